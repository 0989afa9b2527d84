"""Endemic periodic orbit by Newton shooting on the period map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import aux_orbits
from .errors import CollapsedToDiseaseFree, NewtonDivergence, RegimeMismatch
from .integrate import integrate, monodromy
from .model import Coefficients
from .threshold import Regime, ThresholdReport, compute_R

#: Integrator tolerances used inside the shooting loop.
SHOOT_RTOL = 1e-12
SHOOT_ATOL = 1e-13
#: An orbit whose infected component dips below this is the disease-free orbit.
COLLAPSE_TOL = 1e-10


@dataclass
class PeriodicOrbit:
    x0: np.ndarray
    period: float
    residual: float
    multipliers: np.ndarray
    monodromy: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    history: list = field(default_factory=list, repr=False)
    classification: str = ""

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.multipliers)


def poincare(params: Coefficients, x, *, rtol: float = SHOOT_RTOL, atol: float = SHOOT_ATOL):
    """Solution at ``t = ω`` of the trajectory starting at ``x`` at ``t = 0``."""
    omega = params.period
    traj = integrate("original", params, 0.0, x, omega, rtol=rtol, atol=atol,
                     t_eval=[0.0, omega], check_positivity=False)
    return traj.final


def classify_stability(orbit_or_multipliers, tol: float = 1e-6) -> str:
    """``stable``, ``unstable`` or ``nonhyperbolic`` from multiplier moduli."""
    mult = getattr(orbit_or_multipliers, "multipliers", orbit_or_multipliers)
    mod = np.abs(np.asarray(mult))
    if np.all(mod < 1.0 - tol):
        return "stable"
    if np.any(mod > 1.0 + tol):
        return "unstable"
    return "nonhyperbolic"


def default_seed(params: Coefficients, wash_periods: int = 50) -> np.ndarray:
    """Endpoint of a transient run from ``(s0(0), 0.1, y0(0))``."""
    s = aux_orbits.s0(params).initial
    y = aux_orbits.y0(params).initial
    traj = integrate("original", params, 0.0, [s, 0.1, y], wash_periods * params.period,
                     t_eval=[0.0, wash_periods * params.period])
    return traj.final


def _residual(params, x, log_coords):
    if log_coords:
        u = np.log(x)
        return np.log(poincare(params, x)) - u
    return poincare(params, x) - x


def newton_shoot(params: Coefficients, seed, *, tol: float = 1e-10, max_iter: int = 50,
                 max_halvings: int = 20, log_coords: bool = False):
    """Damped Newton on ``G(x) = P(x) - x``; returns ``(x, |G|, residual history)``."""
    x = np.array(seed, dtype=float)
    G = _residual(params, x, log_coords)
    gnorm = float(np.max(np.abs(G)))
    history = [gnorm]
    best = (x.copy(), gnorm)
    for _ in range(max_iter):
        if gnorm < tol:
            return x, gnorm, history
        mono = monodromy(params, x)
        phi = mono.matrix
        if log_coords:
            px = mono.final_state
            phi = (phi / px[:, None]) * x[None, :]
        try:
            delta = np.linalg.solve(phi - np.eye(3), -G)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence("singular shooting Jacobian", best[0], best[1]) from exc
        alpha = 1.0
        for _ in range(max_halvings + 1):
            if log_coords:
                trial = x * np.exp(alpha * delta)
            else:
                trial = x + alpha * delta
            if np.all(trial > 0):
                Gt = _residual(params, trial, log_coords)
                tn = float(np.max(np.abs(Gt)))
                if np.isfinite(tn) and tn < gnorm:
                    break
            alpha *= 0.5
        else:
            raise NewtonDivergence(f"line search failed at |G| = {gnorm:.3e}", best[0], best[1])
        x, G, gnorm = trial, Gt, tn
        history.append(gnorm)
        if gnorm < best[1]:
            best = (x.copy(), gnorm)
    if gnorm < tol:
        return x, gnorm, history
    raise NewtonDivergence(f"no convergence in {max_iter} iterations (|G| = {gnorm:.3e})",
                           best[0], best[1])


def find_endemic_orbit(params: Coefficients, seed=None, *, report: ThresholdReport | None = None,
                       tol: float = 1e-10, max_iter: int = 50, max_halvings: int = 20,
                       wash_periods: int = 50, log_coords: bool = False,
                       samples_per_period: int = 200) -> PeriodicOrbit:
    """Locate an endemic periodic orbit; refused unless the infected prey is permanent."""
    report = report or compute_R(params)
    if report.regime is not Regime.PERMANENCE:
        raise RegimeMismatch(f"R = {report.R:.6f} ({report.regime.value}); no endemic orbit")
    if seed is None:
        seed = default_seed(params, wash_periods)
    x, gnorm, history = newton_shoot(params, seed, tol=tol, max_iter=max_iter,
                                     max_halvings=max_halvings, log_coords=log_coords)
    omega = params.period
    traj = integrate("original", params, 0.0, x, omega, dt=omega / samples_per_period,
                     rtol=SHOOT_RTOL, atol=SHOOT_ATOL)
    if float(np.min(traj.x[:, 1])) < COLLAPSE_TOL:
        raise CollapsedToDiseaseFree(
            f"min I over the period is {np.min(traj.x[:, 1]):.3e}; converged to the disease-free orbit")
    mono = monodromy(params, x)
    orbit = PeriodicOrbit(x, omega, gnorm, mono.multipliers, mono.matrix, traj.t, traj.x, history)
    orbit.classification = classify_stability(orbit)
    return orbit


def _workers() -> int:
    env = os.environ.get("ECOEPI_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def find_endemic_orbits(params: Coefficients, seeds, *, wash_periods: int = 50,
                        distinct_tol: float = 1e-6, workers: int | None = None):
    """Search from several seeds; returns ``(distinct orbits, per-seed x0 or exception)``.

    Each seed is washed for ``wash_periods`` before Newton. Orbits whose
    initial points agree within ``distinct_tol`` are reported once.
    """
    report = compute_R(params)

    def one(seed):
        washed = integrate("original", params, 0.0, seed, wash_periods * params.period,
                           t_eval=[0.0, wash_periods * params.period]).final
        try:
            return find_endemic_orbit(params, washed, report=report)
        except (NewtonDivergence, CollapsedToDiseaseFree) as exc:
            return exc

    with ThreadPoolExecutor(max_workers=workers or _workers()) as pool:
        results = list(pool.map(one, [np.asarray(s, dtype=float) for s in seeds]))
    distinct = []
    for res in results:
        if isinstance(res, PeriodicOrbit):
            if not any(np.max(np.abs(res.x0 - d.x0)) < distinct_tol for d in distinct):
                distinct.append(res)
    return distinct, results
