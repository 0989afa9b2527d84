"""Full analysis pipeline for one scenario, written to a directory."""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from . import csvio, plotting
from .aux_orbits import disease_free_orbits, return_residual
from .endemic import classify_stability, find_endemic_orbit
from .errors import EcoEpiError, HypothesisViolated
from .integrate import integrate
from .mawhin import (compute_bounds, degree_determinant, estimate_permanence_floor,
                     mawhin_radius, solve_algebraic_root)
from .scenario import Scenario
from .threshold import Regime, ThresholdReport, compute_R


def _fmt_mult(mult) -> str:
    parts = []
    for z in mult:
        if z.imag == 0:
            parts.append(f"{z.real:.9g}")
        else:
            parts.append(f"{z.real:.9g}{z.imag:+.9g}i")
    return "[" + ", ".join(parts) + "]"


def format_threshold(rep: ThresholdReport) -> str:
    lines = [f"{k} = {v}" for k, v in rep.as_rows()]
    lines += [f"diagnostic: {d}" for d in rep.diagnostics]
    return "\n".join(lines)


def format_bounds(bounds, root, det) -> str:
    lines = [f"{k} = {v}" for k, v in bounds.as_rows()]
    lines += [
        f"p1* = {float(root.p[0])!r}", f"p2* = {float(root.p[1])!r}", f"p3* = {float(root.p[2])!r}",
        f"quadratic = {root.quadratic[0]!r} X^2 + {root.quadratic[1]!r} X + {root.quadratic[2]!r}",
        f"discriminant = {root.discriminant!r}",
        f"max_residual = {float(np.max(np.abs(root.residuals)))!r}",
        f"M0 = {root.M0!r}",
        f"M = {mawhin_radius(bounds, root)!r}",
        f"determinant = {det.determinant!r}",
        f"determinant_closed_form = {float(det.closed_form)!r}",
        f"determinant_sign = {'negative' if det.determinant < 0 else 'nonnegative'}",
        f"degree = {det.degree}",
    ]
    lines += [f"diagnostic: {d}" for d in root.diagnostics]
    return "\n".join(lines)


def run_report(sc: Scenario, out_dir, figures: bool = True) -> str:
    """Threshold, disease-free orbits, endemic orbit and proof objects into ``out_dir``."""
    t_start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = sc.coefficients
    omega = params.period
    text = [f"scenario: {sc.source or '<in-memory>'}", f"period: {omega!r}", ""]

    o1, o2 = disease_free_orbits(params)
    rep = compute_R(params, o1.s0, o2.y0)
    csvio.write_key_values(out / "threshold.csv", rep.as_rows())
    text += ["[threshold]", format_threshold(rep)]
    if rep.regime is Regime.EXTINCTION:
        text.append("interpretation: infected prey goes extinct; solutions with Y > 0 approach O2 "
                    "and solutions with Y = 0 approach O1")
    elif rep.regime is Regime.PERMANENCE:
        text.append("interpretation: infected prey is permanent; O1 and O2 are unstable and an "
                    "endemic periodic orbit exists")
    text.append("")

    orbit_plots = {}
    for orb in (o1, o2):
        t, x = orb.samples()
        csvio.write_trajectory(out / f"orbit_{orb.label}.csv", t, x)
        csvio.write_multipliers(out / f"multipliers_{orb.label}.csv", orb.multipliers)
        orbit_plots[orb.label] = (t, x)
        text += [f"[orbit {orb.label}]",
                 f"initial = {orb.initial.tolist()}",
                 f"return_residual = {return_residual(params, orb):.3e}",
                 f"multipliers = {_fmt_mult(orb.multipliers)}",
                 f"infected_multiplier = {orb.infected_multiplier!r}",
                 f"stability = {classify_stability(orb.multipliers)}", ""]
    text.append(f"predicted_infected_multiplier_O2 = {rep.predicted_infected_multiplier()!r}")
    text.append("")

    mult_plots = {"O1": o1.multipliers, "O2": o2.multipliers}
    endemic = None
    text.append("[endemic orbit]")
    if rep.regime is Regime.PERMANENCE:
        try:
            endemic = find_endemic_orbit(params, report=rep)
        except EcoEpiError as exc:
            text.append(f"search failed: {type(exc).__name__}: {exc}")
        else:
            csvio.write_trajectory(out / "orbit_endemic.csv", endemic.t, endemic.samples)
            csvio.write_multipliers(out / "multipliers_endemic.csv", endemic.multipliers)
            orbit_plots["endemic"] = (endemic.t, endemic.samples)
            mult_plots["endemic"] = endemic.multipliers
            text += [f"x0 = {endemic.x0.tolist()}",
                     f"residual = {endemic.residual:.3e}",
                     f"newton_history = {[f'{h:.2e}' for h in endemic.history]}",
                     f"multipliers = {_fmt_mult(endemic.multipliers)}",
                     f"stability = {endemic.classification} (numerical probe, not a theorem)"]
    else:
        text.append(f"not applicable: regime {rep.regime.value}")
    text.append("")

    text.append("[a priori bounds and degree]")
    try:
        root = solve_algebraic_root(params)
        det = degree_determinant(root, params)
        if rep.regime is Regime.PERMANENCE:
            m = estimate_permanence_floor(params, report=rep)
        else:
            m = float("nan")
        if np.isfinite(m):
            bounds = compute_bounds(params, m)
            csvio.write_key_values(out / "bounds.csv", bounds.as_rows() + [
                ("p1", root.p[0]), ("p2", root.p[1]), ("p3", root.p[2]),
                ("determinant", det.determinant), ("degree", float(det.degree))])
            text.append(format_bounds(bounds, root, det))
            if endemic is not None:
                text.append(f"endemic orbit within bounds: {bounds.check_orbit(endemic.samples)}")
        else:
            text.append("permanence floor unavailable outside the permanence regime")
    except HypothesisViolated as exc:
        text.append(f"not applicable: {exc}")
    text.append("")

    runs = {}
    for name, x0 in sc.inits.items():
        traj = integrate("original", params, 0.0, x0, sc.horizon, dt=sc.sample_dt)
        csvio.write_trajectory(out / f"trajectory_{name}.csv", traj.t, traj.x)
        runs[name] = (traj.t, traj.x)
        text.append(f"trajectory {name}: start {list(x0)} -> end {traj.final.tolist()} "
                    f"at t = {sc.horizon!r}")
    if figures:
        if runs:
            plotting.plot_trajectories(out / "trajectories.png", runs,
                                       f"R = {rep.R:.4f} ({rep.regime.value})")
        plotting.plot_orbits(out / "orbits.png", orbit_plots, "periodic orbits over one period")
        plotting.plot_multipliers(out / "multipliers.png", mult_plots)
    text.append("")
    text.append(f"elapsed_seconds = {time.perf_counter() - t_start:.2f}")
    summary = "\n".join(text) + "\n"
    (out / "summary.txt").write_text(summary)
    return summary
