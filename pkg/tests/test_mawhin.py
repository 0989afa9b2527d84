import math

import numpy as np
import pytest
import scipy.optimize

from ecoepi.errors import HypothesisViolated, NonpositiveBound, RegimeMismatch
from ecoepi.mawhin import (averaged_field, compute_bounds, degree_determinant,
                          estimate_permanence_floor, jacobian_matrix, mawhin_radius,
                          solve_algebraic_root)
from ecoepi.model import field
from ecoepi.periodic import Constant, Harmonic

from conftest import benchmark_params, constant_params, random_constant_params

P045 = benchmark_params(0.45)
P060 = benchmark_params(0.6)


@pytest.fixture(scope="module")
def floor060():
    return estimate_permanence_floor(P060)


def grid_max(fn, n=8192):
    t = np.arange(n) / n
    v = fn(t)
    return v.max(), v.min()


def test_constant_bounds_by_hand():
    p = constant_params(Lambda=1.0, mu=0.5, r=0.3, b=0.6, k=0.5, eta=0.2, c=0.1)
    bd = compute_bounds(p, m=0.1)
    assert bd.A2 == pytest.approx(2.0, abs=1e-12)
    assert bd.B1 == pytest.approx(0.5, abs=1e-12)
    assert bd.B2 == pytest.approx(5 / 6, abs=1e-12)
    assert bd.A1 == pytest.approx(3.75, abs=1e-12)
    assert bd.theta3 == pytest.approx((math.log(0.5), math.log(5 / 6)))
    assert bd.theta2 == pytest.approx((math.log(0.1), math.log(2.0)))
    assert bd.theta1[0] == pytest.approx(math.log(1.0 / (0.4 * 0.1 + 0.5)))


def test_benchmark_bounds_against_grid(floor060):
    p = P060
    bd = compute_bounds(p, floor060)
    A2 = grid_max(lambda t: p.Lambda(t) / p.mu(t))[0]
    B1 = grid_max(lambda t: p.r(t) / p.b(t))[1]
    B2 = grid_max(lambda t: (p.r(t) + p.k(t) * p.eta(t) * A2) / p.b(t))[0]
    A1 = grid_max(lambda t: p.Lambda(t) / (p.c(t) + p.eta(t) * B2))[1]
    np.testing.assert_allclose([bd.A1, bd.A2, bd.B1, bd.B2], [A1, A2, B1, B2], rtol=0, atol=1e-6)
    for lo, hi in (bd.theta1, bd.theta2, bd.theta3):
        assert lo <= hi
    assert bd.B1 <= bd.B2 and bd.A1 <= bd.A2 and bd.B1 > 0


def test_nonpositive_floor_rejected():
    with pytest.raises(NonpositiveBound):
        compute_bounds(P060, 0.0)


def test_root_is_constant_equilibrium():
    rng = np.random.default_rng(4)
    for _ in range(10):
        p = random_constant_params(rng)
        root = solve_algebraic_root(p)
        sol = scipy.optimize.root(lambda u: field(p, 0.0, np.exp(u)) / np.exp(u), np.zeros(3),
                                  method="lm", options={"xtol": 1e-15, "ftol": 1e-15})
        x = np.exp(sol.x)
        assert np.max(np.abs(field(p, 0.0, x))) < 1e-12
        np.testing.assert_allclose(root.exp_p, x, atol=1e-10)


def test_benchmark_root():
    root = solve_algebraic_root(P060)
    assert np.max(np.abs(root.residuals)) < 1e-10
    assert root.M0 == pytest.approx(np.sum(np.abs(root.p)) + 1)
    assert root.diagnostics == []  # k is constant, so the two readings of mean(k eta) agree
    with pytest.raises(HypothesisViolated):
        solve_algebraic_root(P045)


def test_linear_branch():
    p = P060.replace(k=Constant(0.0))
    root = solve_algebraic_root(p)
    assert root.quadratic[0] == 0.0
    avg = root.averages
    L, be, mu, c, eta, r, b = (avg[k] for k in ("Lambda", "beta", "mu", "c", "eta", "r", "b"))
    expect = (L - (mu / be) * (c + eta * r / b)) / (c + eta * r / b)
    assert root.exp_p[1] == pytest.approx(expect, rel=1e-12)
    assert np.max(np.abs(root.residuals)) < 1e-10


def test_kbar_etabar_diagnostic():
    p = P060.replace(k=Harmonic(0.9, 0.5, 0.0))
    root = solve_algebraic_root(p)
    assert any("mean(kη)" in d for d in root.diagnostics)
    assert np.max(np.abs(root.residuals)) < 1e-10


def test_determinant_two_routes():
    root = solve_algebraic_root(P060)
    det = degree_determinant(root, P060)
    assert det.determinant < 0 and det.degree == -1
    assert det.relative_gap < 1e-10


def test_determinant_column_scaling():
    root = solve_algebraic_root(P060)
    J = jacobian_matrix(root)
    for kappa in (0.5, 3.0):
        Jk = J.copy()
        Jk[:, 0] *= kappa
        assert np.linalg.det(Jk) == pytest.approx(kappa * np.linalg.det(J), rel=1e-12)


def test_floor(floor060, endemic060):
    assert floor060 > 0
    assert floor060 == pytest.approx(0.0275, abs=5e-4)
    assert np.min(endemic060.samples[:, 1]) > floor060
    with pytest.raises(RegimeMismatch):
        estimate_permanence_floor(P045)


def test_orbit_inside_bounds(floor060, endemic060):
    bd = compute_bounds(P060, floor060)
    checks = bd.check_orbit(endemic060.samples)
    assert all(checks.values()), checks
    root = solve_algebraic_root(P060)
    assert mawhin_radius(bd, root) > root.M0


def test_quadratic_sign_equivalence():
    rng = np.random.default_rng(8)
    for _ in range(200):
        vals = rng.uniform(0.05, 2.0, 8)
        p = constant_params(*vals)
        a = p.Lambda.average()
        R_avg = (p.beta.value * a / p.mu.value) / (p.c.value + p.eta.value * p.r.value / p.b.value)
        if R_avg > 1:
            root = solve_algebraic_root(p)
            assert root.quadratic[2] < 0
            assert np.max(np.abs(averaged_field(root.averages, root.p))) < 1e-10
        else:
            with pytest.raises(HypothesisViolated):
                solve_algebraic_root(p)
