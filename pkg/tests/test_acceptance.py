"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines, or execute this
file directly.
"""

import time

import numpy as np
import pytest
import scipy.optimize

from ecoepi.aux_orbits import disease_free_orbits, return_residual, s0, y0
from ecoepi.endemic import find_endemic_orbit
from ecoepi.integrate import integrate, monodromy, rhs, rk4
from ecoepi.mawhin import (compute_bounds, degree_determinant, estimate_permanence_floor,
                          solve_algebraic_root)
from ecoepi.model import field, jacobian
from ecoepi.periodic import Sampled
from ecoepi.scenario import load_config
from ecoepi.threshold import compute_R

from conftest import ACCEPTANCE_LINES, random_constant_params, random_harmonic_params


def _params(name):
    return load_config(name).coefficients


P045 = _params("paper_gamma045.cfg")
P060 = _params("paper_gamma060.cfg")


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} :: {detail}"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)
    assert ok, detail


def test_criterion_1_threshold():
    out = []
    ok = True
    for p, lo, hi in ((P045, 0.921, 0.931), (P060, 1.233, 1.243)):
        start = time.perf_counter()
        R = compute_R(p).R
        dt = time.perf_counter() - start
        ok &= lo <= R <= hi and dt < 5.0
        out.append(f"R={R:.6f} in [{lo}, {hi}] ({dt:.2f}s)")
    report(1, "threshold reproduction", ok, "; ".join(out))


def test_criterion_2_route_agreement():
    gaps = [compute_R(P045).route_gap, compute_R(P060).route_gap]
    rng = np.random.default_rng(20261016)
    for _ in range(50):
        p = random_harmonic_params(rng)
        p.check()
        gaps.append(compute_R(p).route_gap)
    worst = max(gaps)
    report(2, "route agreement", worst < 1e-8, f"max gap {worst:.2e} over {len(gaps)} sets")


def test_criterion_3_disease_free_orbit():
    s, y = s0(P045), y0(P045)
    o1, o2 = disease_free_orbits(P045, with_multipliers=False)
    res = max(s.residual, y.residual, return_residual(P045, o1), return_residual(P045, o2))
    ok = 1.147 <= s.initial <= 1.157 and 0.664 <= y.initial <= 0.674 and res < 1e-9
    report(3, "disease-free orbit reproduction", ok,
           f"s0(0)={s.initial:.6f}, y0(0)={y.initial:.6f}, max return residual {res:.1e}")


def test_criterion_4_stability_dichotomy():
    parts, ok = [], True
    for p, below in ((P045, True), (P060, False)):
        rep = compute_R(p)
        _, o2 = disease_free_orbits(p)
        mult = o2.infected_multiplier
        pred = rep.predicted_infected_multiplier()
        rel = abs(mult - pred) / abs(pred)
        ok &= ((abs(mult) < 1) == below) and rel < 1e-6
        parts.append(f"|mult|={abs(mult):.6f} rel.err {rel:.1e}")
    report(4, "stability dichotomy", ok, "; ".join(parts))


def test_criterion_5_endemic_orbit():
    start = time.perf_counter()
    orb = find_endemic_orbit(P060)
    elapsed = time.perf_counter() - start
    near = np.max(np.abs(orb.x0 - np.array([1.082, 0.065, 0.799])))
    traj = integrate("original", P060, 0.0, orb.x0, 5.0, rtol=1e-12, atol=1e-13,
                     t_eval=np.arange(6.0))
    drift = float(np.max(np.abs(traj.x - orb.x0)))
    ok = orb.residual < 1e-10 and near <= 0.01 and drift < 5e-8 and elapsed < 30
    report(5, "endemic orbit reproduction", ok,
           f"x0={np.round(orb.x0, 6).tolist()}, residual {orb.residual:.1e}, "
           f"5-period drift {drift:.1e}, {elapsed:.2f}s")


def test_criterion_6_extinction():
    s, y = s0(P045), y0(P045)
    parts, ok = [], True
    for x0 in ((2.0, 0.2, 0.5), (0.1, 0.6, 0.7)):
        traj = integrate("original", P045, 0.0, x0, 200.0)
        last = traj.t >= 199.0
        t = traj.t[last]
        dist = max(np.max(np.abs(traj.x[last, 0] - s.fn(t))),
                   np.max(np.abs(traj.x[last, 2] - y.fn(t))))
        I_end = traj.final[1]
        ok &= I_end < 1e-3 and dist < 1e-2
        parts.append(f"I(200)={I_end:.1e}, dist={dist:.1e}")
    report(6, "extinction behavior", ok, "; ".join(parts))


def _positive_equilibrium(p):
    # per-capita rates over x = exp(u) exclude the boundary equilibria; neutral start
    sol = scipy.optimize.root(lambda u: field(p, 0.0, np.exp(u)) / np.exp(u), np.zeros(3),
                              method="lm", options={"xtol": 1e-15, "ftol": 1e-15})
    return np.exp(sol.x)


def test_criterion_7_constant_oracle():
    rng = np.random.default_rng(7)
    worst, worst_aux = 0.0, 0.0
    for _ in range(20):
        p = random_constant_params(rng)
        alg = solve_algebraic_root(p).exp_p
        direct = _positive_equilibrium(p)
        shot = find_endemic_orbit(p).x0
        worst = max(worst, np.max(np.abs(alg - direct)), np.max(np.abs(alg - shot)),
                    np.max(np.abs(direct - shot)))
        worst_aux = max(worst_aux, abs(s0(p).initial - p.Lambda.value / p.mu.value),
                        abs(y0(p).initial - p.r.value / p.b.value))
    ok = worst < 1e-8 and worst_aux < 1e-10
    report(7, "constant-coefficient oracle", ok,
           f"max root disagreement {worst:.1e}, max s0/y0 error {worst_aux:.1e}")


def test_criterion_8_mawhin_objects():
    root = solve_algebraic_root(P060)
    det = degree_determinant(root, P060)
    orb = find_endemic_orbit(P060)
    bounds = compute_bounds(P060, estimate_permanence_floor(P060))
    checks = bounds.check_orbit(orb.samples)
    resid = float(np.max(np.abs(root.residuals)))
    ok = (resid < 1e-10 and det.determinant < 0 and det.relative_gap < 1e-10
          and checks["Y_in_[B1,B2]"] and checks["S+I_le_A2"])
    report(8, "Mawhin proof objects", ok,
           f"residual {resid:.1e}, det={det.determinant:.6g}, two-route gap {det.relative_gap:.1e}, "
           f"Y in [{bounds.B1:.4f}, {bounds.B2:.4f}] and S+I <= {bounds.A2:.4f}: "
           f"{checks['Y_in_[B1,B2]'] and checks['S+I_le_A2']}")


def test_criterion_9_property_suites():
    rng = np.random.default_rng(9)
    parts, ok = [], True

    ts = rng.uniform(-5, 5, 200)
    samp = Sampled.from_function(P060.beta, 1.0, 256)
    per = max(max(abs(f(t) - f(t + 1.0)) for t in ts) for _, f in P060.items())
    per = max(per, max(abs(samp(t) - samp(t + 1.0)) for t in ts))
    ok &= per < 1e-9
    parts.append(f"periodicity {per:.1e}")

    X = rng.uniform(0.01, 3, (100, 2))
    face = max(max(abs(field(P060, t, [a, 0.0, b])[1]), abs(field(P060, t, [a, b, 0.0])[2]))
               for t, (a, b) in zip(ts, X))
    ok &= face == 0.0
    parts.append(f"faces {face:.1e}")

    h, worst = 1e-6, 0.0
    for _ in range(100):
        t, x = rng.uniform(0, 1), rng.uniform(0.1, 3.0, 3)
        J = jacobian(P060, t, x)
        fd = np.column_stack([(field(P060, t, x + h * e) - field(P060, t, x - h * e)) / (2 * h)
                              for e in np.eye(3)])
        worst = max(worst, np.max(np.abs(J - fd)) / np.max(np.abs(J)))
    ok &= worst < 1e-6
    parts.append(f"jacobian fd {worst:.1e}")

    liou = max(monodromy(P060, x).liouville_error
               for x in ([2.0, 0.2, 0.5], [0.1, 0.6, 0.7], [1.08, 0.065, 0.8]))
    ok &= liou < 1e-6
    parts.append(f"liouville {liou:.1e}")

    x0 = np.array([2.0, 0.2, 0.5])
    ref = integrate("original", P060, 0.0, x0, 1.0, rtol=1e-13, atol=1e-14, t_eval=[0, 1]).final
    errs = [np.max(np.abs(rk4(rhs("original", P060), 0.0, x0, 1.0, [0, 1], hh)[0][-1] - ref))
            for hh in (1 / 50, 1 / 100)]
    ratio = errs[0] / errs[1]
    ok &= 12 <= ratio <= 20
    parts.append(f"rk4 ratio {ratio:.2f}")
    report(9, "property suites", ok, "; ".join(parts))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-s", "-q"]))
