"""Command-line interface.

Exit codes: 0 success, 1 I/O error, 2 parse or validation error, 3 regime or
hypothesis mismatch, 4 solver failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import csvio, plotting
from .endemic import find_endemic_orbit
from .errors import (EcoEpiError, HypothesisViolated, ParseError, RegimeMismatch,
                     ValidationError)
from .integrate import integrate
from .mawhin import (compute_bounds, degree_determinant, estimate_permanence_floor,
                     solve_algebraic_root)
from .report import format_bounds, format_threshold, run_report
from .scenario import load_config, parse_number
from .threshold import compute_R

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_REGIME, EXIT_SOLVER = 0, 1, 2, 3, 4


def _state(text: str):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected S,I,Y")
    return tuple(parse_number(p) for p in parts)


def cmd_threshold(args) -> int:
    sc = load_config(args.config, strict=args.strict)
    print(format_threshold(compute_R(sc.coefficients)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = load_config(args.config, strict=args.strict)
    if args.init in sc.inits:
        x0 = sc.inits[args.init]
    else:
        try:
            x0 = _state(args.init)
        except (argparse.ArgumentTypeError, ValueError):
            raise ValidationError(f"unknown initial condition {args.init!r}; "
                                  f"known: {sorted(sc.inits)}")
    if min(x0) < 0:
        raise ValidationError("initial condition leaves the nonnegative cone")
    t_end = args.t_end if args.t_end is not None else sc.horizon
    dt = args.dt if args.dt is not None else sc.sample_dt
    traj = integrate("original", sc.coefficients, 0.0, x0, t_end, dt=dt, method=args.method)
    csvio.write_trajectory(args.out, traj.t, traj.x)
    if args.figure:
        plotting.plot_trajectories(args.figure, {args.init: (traj.t, traj.x)})
    print(f"wrote {len(traj)} samples to {args.out}; final state {traj.final.tolist()}")
    return EXIT_OK


def cmd_find_orbit(args) -> int:
    sc = load_config(args.config, strict=args.strict)
    orbit = find_endemic_orbit(sc.coefficients, seed=args.seed, log_coords=args.log_coords)
    csvio.write_trajectory(args.out, orbit.t, orbit.samples)
    out = Path(args.out)
    mpath = out.with_name(out.stem + "_multipliers.csv")
    csvio.write_multipliers(mpath, orbit.multipliers)
    print(f"x0 = {orbit.x0.tolist()}")
    print(f"residual = {orbit.residual:.3e}")
    print("multipliers = " + ", ".join(f"{z:.9g}" for z in orbit.multipliers))
    print(f"moduli = {np.abs(orbit.multipliers).tolist()}")
    print(f"stability = {orbit.classification}")
    print(f"wrote {args.out} and {mpath}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    sc = load_config(args.config, strict=args.strict)
    params = sc.coefficients
    root = solve_algebraic_root(params)
    det = degree_determinant(root, params)
    if args.m is not None:
        bounds = compute_bounds(params, args.m, m_estimated=False)
    else:
        bounds = compute_bounds(params, estimate_permanence_floor(params))
    print(format_bounds(bounds, root, det))
    return EXIT_OK


def cmd_report(args) -> int:
    sc = load_config(args.config, strict=args.strict)
    sys.stdout.write(run_report(sc, args.out, figures=not args.no_figures))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ecoepi", description=(
        "Periodic eco-epidemic model with disease in the prey: threshold, "
        "periodic orbits, a priori bounds."))
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario file (or a bundled name)")
        p.add_argument("--strict", action="store_true",
                       help="treat positive-average condition violations as errors")

    p = sub.add_parser("threshold", help="print the threshold report")
    common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("simulate", help="integrate from an initial condition, write CSV")
    common(p)
    p.add_argument("--init", required=True, help="named initial condition or S,I,Y")
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--dt", type=float, default=None, help="output sample spacing")
    p.add_argument("--method", choices=("dopri5", "rk4"), default="dopri5")
    p.add_argument("--out", required=True)
    p.add_argument("--figure", default=None, help="also render S, I, Y panels to this file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("find-orbit", help="Newton shooting for the endemic periodic orbit")
    common(p)
    p.add_argument("--seed", type=_state, default=None, help="S,I,Y starting guess")
    p.add_argument("--log-coords", action="store_true", help="shoot in log coordinates")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_find_orbit)

    p = sub.add_parser("bounds", help="a priori bounds, algebraic root, determinant sign")
    common(p)
    p.add_argument("--m", type=float, default=None,
                   help="permanence floor for I (default: empirical estimate)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("report", help="full pipeline into a directory")
    common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (RegimeMismatch, HypothesisViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except EcoEpiError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
