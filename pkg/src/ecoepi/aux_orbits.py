"""Disease-free periodic orbits.

The prey-only equation ``s' = Λ - μ s`` and the logistic predator equation
``y' = y (r - b y)`` each have a unique positive periodic solution. Both are
built from the same affine machinery: the logistic equation becomes the
linear equation ``z' = -r z + b`` under ``z = 1/y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateOrbit, NonContractive
from .integrate import Monodromy, dopri5, integrate, monodromy
from .model import Coefficients
from .periodic import QUAD_PANELS, PeriodicFn, Sampled, cumulative_simpson, simpson_average


@dataclass
class AuxOrbit:
    """Positive periodic solution of one of the scalar auxiliary equations."""

    initial: float
    t: np.ndarray
    values: np.ndarray
    fn: PeriodicFn
    route: str
    fixed_point_check: float  # Poincaré affine-map fixed point, independent of the closed form
    residual: float = float("nan")  # one-period return error through the integrator

    def __call__(self, t):
        return self.fn(t)


@dataclass
class DiseaseFreeOrbit:
    label: str
    s0: AuxOrbit
    y0: AuxOrbit | None
    monodromy: Monodromy | None = field(default=None, repr=False)

    @property
    def initial(self) -> np.ndarray:
        return np.array([self.s0.initial, 0.0, 0.0 if self.y0 is None else self.y0.initial])

    @property
    def multipliers(self) -> np.ndarray:
        return self.monodromy.multipliers

    @property
    def infected_multiplier(self) -> float:
        """Multiplier along the infected direction; the I row of the monodromy is decoupled."""
        return float(self.monodromy.matrix[1, 1])

    def samples(self, n: int = 200):
        t = np.linspace(0.0, self.s0.fn.period, n + 1)
        Y = np.zeros_like(t) if self.y0 is None else self.y0(t)
        return t, np.column_stack([self.s0(t), np.zeros_like(t), Y])


def _affine_periodic(source: PeriodicFn, rate: PeriodicFn, panels: int):
    """Periodic solution of ``x' = source(t) - rate(t) x`` by variation of constants.

    Returns ``(x(0), grid, x on grid)``.
    """
    omega = rate.period
    if not rate.average() > 0:
        raise NonContractive("average decay rate must be positive for a contracting Poincaré map")
    t = np.linspace(0.0, omega, panels + 1)
    h = omega / panels
    R = cumulative_simpson(rate._values(t), h)
    G = cumulative_simpson(source._values(t) * np.exp(R), h)
    x0 = G[-1] / np.expm1(R[-1])
    return x0, t, np.exp(-R) * (x0 + G)


def _affine_fixed_point(f, omega: float) -> float:
    """Fixed point of the affine period map ``x -> a x + c`` from two integrations."""
    ends, _ = dopri5(f, 0.0, np.array([0.0, 1.0]), omega, [0.0, omega], rtol=1e-13, atol=1e-14)
    c = ends[-1, 0]
    a = ends[-1, 1] - c
    return c / (1.0 - a)


def s0(params: Coefficients, panels: int = QUAD_PANELS) -> AuxOrbit:
    """Positive periodic solution of ``s' = Λ(t) - μ(t) s``."""
    lam, mu, omega = params.Lambda, params.mu, params.period
    x0, t, vals = _affine_periodic(lam, mu, panels)
    fn = Sampled(tuple(vals[:-1]), omega)
    fp = _affine_fixed_point(lambda tt, s: lam(tt) - mu(tt) * s, omega)
    end, _ = dopri5(lambda tt, s: lam(tt) - mu(tt) * s, 0.0, np.array([x0]), omega,
                    [0.0, omega], rtol=1e-13, atol=1e-14)
    return AuxOrbit(float(x0), t, vals, fn, "closed-form", float(fp), float(abs(end[-1, 0] - x0)))


def y0(params: Coefficients, panels: int = QUAD_PANELS) -> AuxOrbit:
    """Positive periodic solution of the logistic equation ``y' = y (r - b y)``."""
    r, b, omega = params.r, params.b, params.period
    if not r.average() > 0:
        raise NonContractive("average of r must be positive")
    if not b.average() > 0:
        raise NonContractive("average of b must be positive")
    z0, t, z = _affine_periodic(b, r, panels)
    if np.min(z) <= 1e-12:
        raise DegenerateOrbit(f"reciprocal orbit reaches {np.min(z):.3e}; y0 blows up")
    vals = 1.0 / z
    fn = Sampled(tuple(vals[:-1]), omega)
    zfp = _affine_fixed_point(lambda tt, zz: b(tt) - r(tt) * zz, omega)
    end, _ = dopri5(lambda tt, y: y * (r(tt) - b(tt) * y), 0.0, np.array([1.0 / z0]), omega,
                    [0.0, omega], rtol=1e-13, atol=1e-14)
    return AuxOrbit(float(1.0 / z0), t, vals, fn, "closed-form", float(1.0 / zfp),
                    float(abs(end[-1, 0] - 1.0 / z0)))


def shoot_aux(kind: str, params: Coefficients, start: float, tol: float = 1e-12,
              max_iter: int = 50) -> float:
    """Newton shooting for the periodic solution of an auxiliary equation.

    ``kind`` is ``"s"`` or ``"y"``. The derivative of the period map comes
    from the scalar variational equation integrated alongside.
    """
    P = params
    if kind == "s":
        def f(t, z):
            return np.array([P.Lambda(t) - P.mu(t) * z[0], -P.mu(t) * z[1]])
    elif kind == "y":
        def f(t, z):
            r, b = P.r(t), P.b(t)
            return np.array([z[0] * (r - b * z[0]), (r - 2.0 * b * z[0]) * z[1]])
    else:
        raise ValueError(kind)
    x = float(start)
    for _ in range(max_iter):
        end, _ = dopri5(f, 0.0, np.array([x, 1.0]), P.period, [0.0, P.period],
                        rtol=1e-13, atol=1e-14)
        g = end[-1, 0] - x
        if abs(g) < tol:
            return x
        slope = end[-1, 1]
        x_new = x - g / (slope - 1.0) if slope < 1.0 else -1.0
        # near the repelling zero solution Newton can overshoot; iterate the map instead
        x = x_new if x_new > 0 else end[-1, 0]
    return x


def disease_free_orbits(params: Coefficients, with_multipliers: bool = True):
    """The orbits ``(s0, 0, 0)`` and ``(s0, 0, y0)`` with full-system Floquet data."""
    s = s0(params)
    y = y0(params)
    o1 = DiseaseFreeOrbit("O1", s, None)
    o2 = DiseaseFreeOrbit("O2", s, y)
    if with_multipliers:
        o1.monodromy = monodromy(params, o1.initial)
        o2.monodromy = monodromy(params, o2.initial)
    return o1, o2


def return_residual(params: Coefficients, orbit: DiseaseFreeOrbit) -> float:
    """Max-norm one-period return error of an assembled orbit in the 3-D system."""
    traj = integrate("original", params, 0.0, orbit.initial, params.period,
                     rtol=1e-12, atol=1e-13, t_eval=[0.0, params.period])
    return float(np.max(np.abs(traj.final - orbit.initial)))


def average_of_product(f: PeriodicFn, orbit: AuxOrbit, panels: int = QUAD_PANELS) -> float:
    """Mean over one period of ``f(t) * orbit(t)``."""
    return simpson_average(f * orbit.fn, panels)
