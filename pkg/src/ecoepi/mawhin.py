"""Explicit objects of the coincidence-degree existence argument.

These are the a priori bounds on periodic solutions of the log-transformed
homotopy, the unique positive root of the averaged algebraic system, and
the sign of the Jacobian determinant at that root (degree -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (HypothesisViolated, NonpositiveBound, NoPositiveRoot, RegimeMismatch,
                     SignViolation)
from .integrate import dopri5, sample_times
from .model import Coefficients, field as vector_field
from .periodic import inf_ratio, sup_ratio
from .threshold import Regime, compute_R

ROOT_RESIDUAL_TOL = 1e-10


@dataclass
class MawhinBounds:
    A1: float
    A2: float
    B1: float
    B2: float
    theta1: tuple
    theta2: tuple
    theta3: tuple
    m: float
    m_estimated: bool = True

    def as_rows(self):
        rows = [("A1", self.A1), ("A2", self.A2), ("B1", self.B1), ("B2", self.B2)]
        for i, th in enumerate((self.theta1, self.theta2, self.theta3), start=1):
            rows += [(f"theta{i}_minus", th[0]), (f"theta{i}_plus", th[1])]
        rows.append(("m", self.m))
        rows.append(("m_provenance", "empirical estimate" if self.m_estimated else "supplied"))
        return rows

    def check_orbit(self, samples) -> dict:
        """Which bounds hold at every sample of an orbit given as rows ``(S, I, Y)``."""
        x = np.asarray(samples, dtype=float)
        S, I, Y = x[:, 0], x[:, 1], x[:, 2]
        u = np.log(x)
        return {
            "Y_in_[B1,B2]": bool(np.all((Y >= self.B1) & (Y <= self.B2))),
            "S+I_le_A2": bool(np.all(S + I <= self.A2)),
            "S+I_ge_A1": bool(np.all(S + I >= self.A1)),
            "u1_in_theta1": bool(np.all((u[:, 0] >= self.theta1[0]) & (u[:, 0] <= self.theta1[1]))),
            "u2_in_theta2": bool(np.all((u[:, 1] >= self.theta2[0]) & (u[:, 1] <= self.theta2[1]))),
            "u3_in_theta3": bool(np.all((u[:, 2] >= self.theta3[0]) & (u[:, 2] <= self.theta3[1]))),
        }


@dataclass
class AlgebraicRoot:
    p: np.ndarray
    quadratic: tuple  # (a, b_q, c_q) in the unknown exp(p2)
    discriminant: float
    residuals: np.ndarray
    M0: float
    averages: dict = field(repr=False)
    diagnostics: list = field(default_factory=list)
    determinant: float | None = None

    @property
    def exp_p(self) -> np.ndarray:
        return np.exp(self.p)


@dataclass
class DegreeCheck:
    determinant: float
    closed_form: float
    printed_form: float
    degree: int

    @property
    def relative_gap(self) -> float:
        return abs(self.determinant - self.closed_form) / abs(self.closed_form)


def _ln(x: float, name: str) -> float:
    if not x > 0:
        raise NonpositiveBound(f"{name} = {x:.6g} is not positive")
    return math.log(x)


def compute_bounds(params: Coefficients, m: float, m_estimated: bool = True) -> MawhinBounds:
    """A priori bounds given a permanence floor ``m`` for the infected prey."""
    if not m > 0:
        raise NonpositiveBound(f"permanence floor m = {m} must be positive")
    p = params
    A2 = sup_ratio(p.Lambda, p.mu)
    B1 = inf_ratio(p.r, p.b)
    B2 = sup_ratio(p.r + (p.k * p.eta) * A2, p.b)
    A1 = inf_ratio(p.Lambda, p.c + p.eta * B2)
    lower1 = p.Lambda.inf() / (p.beta.sup() * m + p.mu.sup())
    return MawhinBounds(
        A1=A1, A2=A2, B1=B1, B2=B2,
        theta1=(_ln(lower1, "Λˡ/(βᵘm+μᵘ)"), _ln(A2, "A2")),
        theta2=(math.log(m), _ln(A2, "A2")),
        theta3=(_ln(B1, "B1"), _ln(B2, "B2")),
        m=m, m_estimated=m_estimated,
    )


def averaged_field(avg: dict, p) -> np.ndarray:
    """The averaged log-coordinate field evaluated at a constant ``p``."""
    e1, e2, e3 = np.exp(p)
    return np.array([
        avg["Lambda"] - avg["beta"] * e1 * e2 - avg["mu"] * e1,
        avg["beta"] * e1 - avg["c"] - avg["eta"] * e3,
        avg["r"] - avg["b"] * e3 + avg["keta"] * e2,
    ])


def solve_algebraic_root(params: Coefficients) -> AlgebraicRoot:
    """Unique positive root of the averaged system via its quadratic in ``exp(p2)``."""
    p = params
    avg = {name: fn.average() for name, fn in p.items()}
    avg["keta"] = (p.k * p.eta).average()
    L, be, mu, c, eta, r, b, keta = (avg[k] for k in
                                     ("Lambda", "beta", "mu", "c", "eta", "r", "b", "keta"))
    R_avg = (be * L / mu) / (c + eta * r / b)
    if not R_avg > 1.0:
        raise HypothesisViolated(f"all-averages threshold {R_avg:.6f} is not > 1")
    a = keta * eta / b
    bq = c + mu * eta * keta / (be * b) + eta * r / b
    cq = (mu / be) * (c + eta * r / b) - L
    disc = bq * bq - 4.0 * a * cq
    if a == 0.0:
        X = -cq / bq
    else:
        # c_q < 0 < b_q: the positive root is c_q / q with no cancellation
        q = -0.5 * (bq + math.sqrt(disc))
        X = cq / q
    if not (X > 0 and math.isfinite(X)):
        raise NoPositiveRoot(f"quadratic gave exp(p2) = {X!r} under a satisfied hypothesis")
    p2 = math.log(X)
    p3 = math.log((r + keta * X) / b)
    p1 = math.log((c + eta * math.exp(p3)) / be)
    root = np.array([p1, p2, p3])
    res = averaged_field(avg, root)
    diagnostics = []
    kbar_etabar = avg["k"] * avg["eta"]
    if abs(kbar_etabar - keta) > 1e-12:
        diagnostics.append(
            f"mean(kη) = {keta:.12g} differs from mean(k)·mean(η) = {kbar_etabar:.12g}; "
            "mean(kη) used throughout")
    if np.max(np.abs(res)) >= ROOT_RESIDUAL_TOL:
        diagnostics.append(f"averaged-system residual {np.max(np.abs(res)):.3e}")
    M0 = float(np.sum(np.abs(root))) + 1.0
    return AlgebraicRoot(root, (a, bq, cq), disc, res, M0, avg, diagnostics)


def jacobian_matrix(root: AlgebraicRoot) -> np.ndarray:
    """Derivative of the averaged log field at the root."""
    avg = root.averages
    e1, e2, e3 = root.exp_p
    return np.array([
        [-avg["Lambda"] / e1, -avg["beta"] * e2, 0.0],
        [avg["beta"] * e1, 0.0, -avg["eta"] * e3],
        [0.0, avg["keta"] * e2, -avg["b"] * e3],
    ])


def degree_determinant(root: AlgebraicRoot, params: Coefficients | None = None) -> DegreeCheck:
    """Determinant at the root, by LU and by cofactor expansion; must be negative."""
    avg = root.averages
    e1, e2, e3 = root.exp_p
    det = float(np.linalg.det(jacobian_matrix(root)))
    closed = -(avg["Lambda"] * avg["keta"] * avg["eta"] / e1
               + avg["b"] * avg["beta"] ** 2 * e1) * e2 * e3
    printed = -(avg["Lambda"] * avg["k"] * avg["eta"] ** 2
                + avg["b"] * avg["beta"] ** 2) * e1 * e2 * e3
    if not det < 0:
        raise SignViolation(f"determinant {det:.6g} is not negative")
    root.determinant = det
    return DegreeCheck(det, float(closed), float(printed), -1)


def mawhin_radius(bounds: MawhinBounds, root: AlgebraicRoot) -> float:
    """Radius of the ball on which the continuation argument is run."""
    Ms = [max(abs(lo), abs(hi)) for lo, hi in (bounds.theta1, bounds.theta2, bounds.theta3)]
    return root.M0 + sum(Ms)


def estimate_permanence_floor(params: Coefficients, *, report=None, grid: int = 5,
                              lo: float = 0.05, hi: float = 3.0, periods: int = 100,
                              discard: int = 50, rtol: float = 1e-9, atol: float = 1e-11) -> float:
    """Half the smallest infected density seen after transients, over a grid of starts.

    The runs are advanced together as one batched integration.
    """
    report = report or compute_R(params)
    if report.regime is not Regime.PERMANENCE:
        raise RegimeMismatch(f"R = {report.R:.6f}: the infected prey is not permanent")
    axis = np.linspace(lo, hi, grid)
    S, I, Y = np.meshgrid(axis, axis, axis, indexing="ij")
    x0 = np.vstack([S.ravel(), I.ravel(), Y.ravel()])
    omega = params.period
    t_eval = np.concatenate([[0.0], sample_times(discard * omega, periods * omega, omega / 200)])
    out, _ = dopri5(lambda t, x: vector_field(params, t, x), 0.0, x0, periods * omega, t_eval,
                    rtol=rtol, atol=atol)
    return 0.5 * float(np.min(out[1:, 1, :]))
