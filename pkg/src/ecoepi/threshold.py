"""The threshold between extinction and permanence of the infected prey.

Linearizing the infected equation along the disease-free orbit ``(s0, 0, y0)``
gives the scalar periodic equation ``w' = (β s0 - c - η y0) w``. The threshold
is computed twice: directly as ``mean(β s0) / (mean(c) + mean(η y0))``, and as
the root ``λ*`` of ``W(0, ω, λ) = 1`` where ``W`` is the evolution operator of
``w' = (β s0 / λ - c - η y0) w``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import aux_orbits
from .aux_orbits import AuxOrbit
from .errors import BracketFailure, LambdaOutOfRange, ZeroDenominator
from .model import Coefficients
from .periodic import QUAD_PANELS

#: Width of the band around 1 where the regime is reported as indeterminate.
REGIME_TOL = 1e-6
#: Route disagreement above which a diagnostic is attached to the report.
ROUTE_TOL = 1e-6


class Regime(enum.Enum):
    EXTINCTION = "Extinction"
    PERMANENCE = "Permanence"
    INDETERMINATE = "Indeterminate"


def classify(R: float, tol: float = REGIME_TOL) -> Regime:
    if abs(R - 1.0) < tol:
        return Regime.INDETERMINATE
    return Regime.EXTINCTION if R <= 1.0 else Regime.PERMANENCE


@dataclass
class ThresholdReport:
    R_quadrature: float
    R_lambda_root: float
    R_averages: float
    regime: Regime
    beta_s0: float
    c_bar: float
    eta_y0: float
    period: float
    diagnostics: list = field(default_factory=list)

    @property
    def R(self) -> float:
        return self.R_quadrature

    @property
    def route_gap(self) -> float:
        return abs(self.R_quadrature - self.R_lambda_root)

    def predicted_infected_multiplier(self) -> float:
        """Floquet multiplier of the disease-free orbit along the infected direction."""
        return math.exp(self.period * (self.c_bar + self.eta_y0) * (self.R - 1.0))

    def as_rows(self):
        return [
            ("R_quadrature", self.R_quadrature),
            ("R_lambda_root", self.R_lambda_root),
            ("R_averages", self.R_averages),
            ("regime", self.regime.value),
            ("mean_beta_s0", self.beta_s0),
            ("mean_c", self.c_bar),
            ("mean_eta_y0", self.eta_y0),
            ("route_gap", self.route_gap),
        ]


class InfectedLinearization:
    """The infected-direction linearization along the disease-free orbit with predators."""

    def __init__(self, params: Coefficients, s0: AuxOrbit | None = None,
                 y0: AuxOrbit | None = None, panels: int = QUAD_PANELS):
        self.params = params
        self.s0 = s0 if s0 is not None else aux_orbits.s0(params)
        self.y0 = y0 if y0 is not None else aux_orbits.y0(params)
        self.panels = panels

    def _parts(self, t):
        p = self.params
        gain = p.beta(t) * self.s0(t)
        loss = p.c(t) + p.eta(t) * self.y0(t)
        return gain, loss

    def log_W(self, s: float, t: float, lam: float) -> float:
        """``log W(s, t, λ) = ∫_s^t (β s0 / λ - c - η y0)``."""
        if not lam > 0:
            raise LambdaOutOfRange(f"λ must be positive, got {lam}")
        if s == t:
            return 0.0
        n = max(2, int(math.ceil(self.panels * abs(t - s) / self.params.period)))
        n += n % 2
        grid = np.linspace(s, t, n + 1)
        gain, loss = self._parts(grid)
        return float(simpson(gain / lam - loss, x=grid))

    def dlog_W(self, s: float, t: float, lam: float) -> float:
        """Derivative of :meth:`log_W` with respect to ``λ``."""
        n = max(2, int(math.ceil(self.panels * abs(t - s) / self.params.period)))
        n += n % 2
        grid = np.linspace(s, t, n + 1)
        gain, _ = self._parts(grid)
        return float(-simpson(gain, x=grid) / lam**2)

    def W(self, s: float, t: float, lam: float) -> float:
        return math.exp(self.log_W(s, t, lam))


def W(params: Coefficients, s: float, t: float, lam: float,
      lin: InfectedLinearization | None = None) -> float:
    """Evolution operator from time ``s`` to ``t`` of ``w' = (β s0/λ - c - η y0) w``."""
    if not lam > 0:
        raise LambdaOutOfRange(f"λ must be positive, got {lam}")
    lin = lin or InfectedLinearization(params)
    return lin.W(s, t, lam)


def lambda_root(params: Coefficients, lin: InfectedLinearization | None = None,
                bracket=(1e-6, 1e6), tol: float = 1e-12) -> float:
    """Root ``λ*`` of ``W(0, ω, λ) = 1`` by log-scale bisection and Newton polish."""
    lin = lin or InfectedLinearization(params)
    omega = params.period

    def g(lam):
        return lin.log_W(0.0, omega, lam)

    lo, hi = bracket
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise BracketFailure(f"log W has no sign change on [{lo:g}, {hi:g}]")
    # g is decreasing in λ when mean(β s0) > 0
    for _ in range(200):
        if hi / lo - 1.0 < 1e-6:
            break
        mid = math.sqrt(lo * hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    lam = math.sqrt(lo * hi)
    for _ in range(50):
        val = g(lam)
        if abs(val) < tol:
            return lam
        step = val / lin.dlog_W(0.0, omega, lam)
        new = lam - step
        if not lo <= new <= hi:
            new = 0.5 * (lo + hi)
        if (g(new) > 0) == (glo > 0):
            lo = new
        else:
            hi = new
        if new == lam:
            return lam
        lam = new
    return lam


def compute_R(params: Coefficients, s0: AuxOrbit | None = None,
              y0: AuxOrbit | None = None) -> ThresholdReport:
    """Threshold report with both computation routes and the all-averages variant."""
    lin = InfectedLinearization(params, s0, y0)
    p = params
    beta_s0 = aux_orbits.average_of_product(p.beta, lin.s0)
    eta_y0 = aux_orbits.average_of_product(p.eta, lin.y0)
    c_bar = p.c.average()
    denom = c_bar + eta_y0
    if denom <= 1e-14:
        raise ZeroDenominator(f"mean(c) + mean(η y0) = {denom:.3e}")
    R = beta_s0 / denom
    R_root = lambda_root(params, lin)
    R_avg = (p.beta.average() * p.Lambda.average() / p.mu.average()) / (
        c_bar + p.eta.average() * p.r.average() / p.b.average())
    report = ThresholdReport(R, R_root, R_avg, classify(R), beta_s0, c_bar, eta_y0, p.period)
    if report.route_gap > ROUTE_TOL:
        report.diagnostics.append(
            f"quadrature and λ-root routes disagree by {report.route_gap:.3e}")
    if (R > 1.0) != (R_avg > 1.0):
        report.diagnostics.append(
            f"R = {R:.6f} and the all-averages variant {R_avg:.6f} lie on opposite sides of 1")
    return report
