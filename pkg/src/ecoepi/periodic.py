"""Periodic scalar coefficient functions.

Every model coefficient is an omega-periodic function of time. Three leaf
forms are supported (:class:`Constant`, :class:`Harmonic`, :class:`Sampled`)
plus two composite nodes built by arithmetic (:class:`Product`,
:class:`LinearCombination`). Composite averages are always taken of the
pointwise expression, so ``(k * eta).average()`` is the mean of the product,
not the product of the means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import DivisorVanishes

#: Default number of Simpson panels for averages of non-closed-form functions.
QUAD_PANELS = 2048
#: Default grid size of the extremum scan.
SCAN_POINTS = 4096
#: Golden-section stopping width in t.
REFINE_TOL = 1e-12

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _same_period(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0)


class PeriodicFn:
    """Base class. Subclasses implement ``_values`` for arrays of times in [0, period)."""

    period: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self._values(np.mod(t, self.period))
        if out.ndim == 0:
            return float(out)
        return out

    def _values(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def average(self, panels: int = QUAD_PANELS) -> float:
        return simpson_average(self, panels)

    def sup(self, n: int = SCAN_POINTS) -> float:
        return _extremum(self, self.period, maximize=True, n=n)

    def inf(self, n: int = SCAN_POINTS) -> float:
        return _extremum(self, self.period, maximize=False, n=n)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        return LinearCombination.of(self, 1.0) + other

    __radd__ = __add__

    def __neg__(self):
        return LinearCombination.of(self, -1.0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PeriodicFn):
            return Product(self, other)
        return LinearCombination.of(self, float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PeriodicFn):
            return NotImplemented
        return LinearCombination.of(self, 1.0 / float(other))


@dataclass(frozen=True)
class Constant(PeriodicFn):
    value: float
    period: float = 1.0

    def _values(self, t):
        return np.full(np.shape(t), self.value, dtype=float)

    def average(self, panels: int = QUAD_PANELS) -> float:
        return float(self.value)

    def sup(self, n: int = SCAN_POINTS) -> float:
        return float(self.value)

    def inf(self, n: int = SCAN_POINTS) -> float:
        return float(self.value)


@dataclass(frozen=True)
class Harmonic(PeriodicFn):
    """``t -> base * (1 + amp * cos(phase + 2*pi*t/period))``."""

    base: float
    amp: float
    phase: float = 0.0
    period: float = 1.0

    def _values(self, t):
        return self.base * (1.0 + self.amp * np.cos(self.phase + 2.0 * np.pi * t / self.period))

    def average(self, panels: int = QUAD_PANELS) -> float:
        return float(self.base)

    def antiderivative(self, t):
        """Exact integral from 0 to ``t`` (any real ``t``, not reduced mod period)."""
        t = np.asarray(t, dtype=float)
        w = 2.0 * np.pi / self.period
        return self.base * (t + self.amp / w * (np.sin(self.phase + w * t) - np.sin(self.phase)))


@dataclass(frozen=True)
class Sampled(PeriodicFn):
    """Values on a uniform grid over ``[0, period)`` joined by a periodic cubic spline."""

    values: tuple
    period: float = 1.0
    source: str | None = field(default=None, compare=False)
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 3:
            raise ValueError("Sampled needs at least 3 grid values")
        object.__setattr__(self, "values", vals)
        n = len(vals)
        x = np.linspace(0.0, self.period, n + 1)
        y = np.append(np.asarray(vals), vals[0])
        object.__setattr__(self, "_spline", CubicSpline(x, y, bc_type="periodic"))

    @classmethod
    def from_function(cls, func: Callable, period: float, n: int, source=None) -> "Sampled":
        t = np.arange(n) * (period / n)
        return cls(tuple(np.asarray(func(t), dtype=float)), period, source)

    def _values(self, t):
        return self._spline(t)


@dataclass(frozen=True)
class Product(PeriodicFn):
    left: PeriodicFn
    right: PeriodicFn

    def __post_init__(self):
        if not _same_period(self.left.period, self.right.period):
            raise ValueError("period mismatch in product")

    @property
    def period(self):
        return self.left.period

    def _values(self, t):
        return self.left._values(t) * self.right._values(t)


@dataclass(frozen=True)
class LinearCombination(PeriodicFn):
    """``offset + sum(coef * fn)``; its average is computed term by term."""

    terms: tuple  # of (coef, PeriodicFn)
    offset: float = 0.0

    def __post_init__(self):
        if not self.terms:
            raise ValueError("LinearCombination needs at least one term")
        p = self.terms[0][1].period
        for _, fn in self.terms:
            if not _same_period(fn.period, p):
                raise ValueError("period mismatch in linear combination")

    @classmethod
    def of(cls, fn: PeriodicFn, coef: float) -> "LinearCombination":
        if isinstance(fn, LinearCombination):
            return cls(tuple((coef * c, f) for c, f in fn.terms), coef * fn.offset)
        return cls(((coef, fn),))

    @property
    def period(self):
        return self.terms[0][1].period

    def __add__(self, other):
        if isinstance(other, LinearCombination):
            return LinearCombination(self.terms + other.terms, self.offset + other.offset)
        if isinstance(other, PeriodicFn):
            return LinearCombination(self.terms + ((1.0, other),), self.offset)
        return LinearCombination(self.terms, self.offset + float(other))

    __radd__ = __add__

    def _values(self, t):
        out = np.full(np.shape(t), self.offset, dtype=float)
        for c, f in self.terms:
            out = out + c * f._values(t)
        return out

    def average(self, panels: int = QUAD_PANELS) -> float:
        return self.offset + sum(c * f.average(panels) for c, f in self.terms)


# --------------------------------------------------------------------------
# module-level operations


def evaluate(f: PeriodicFn, t):
    """``f(t mod period)``."""
    return f(t)


def average(f: PeriodicFn) -> float:
    return f.average()


def sup(f: PeriodicFn) -> float:
    return f.sup()


def inf(f: PeriodicFn) -> float:
    return f.inf()


def simpson_average(f: Callable, period_or_panels=None, panels: int | None = None) -> float:
    """Composite Simpson mean of ``f`` over one period.

    Called as ``simpson_average(fn)`` / ``simpson_average(fn, panels)`` for a
    :class:`PeriodicFn`, or ``simpson_average(callable, period, panels)`` for a
    bare vectorized callable.
    """
    if isinstance(f, PeriodicFn):
        period = f.period
        n = QUAD_PANELS if period_or_panels is None else int(period_or_panels)
        func = f._values
    else:
        period = float(period_or_panels)
        n = QUAD_PANELS if panels is None else int(panels)
        func = f
    if n % 2:
        n += 1
    t = np.linspace(0.0, period, n + 1)
    vals = np.asarray(func(t), dtype=float)
    return float(simpson(vals, x=t) / period)


def cumulative_simpson(values, h: float) -> np.ndarray:
    """Running integral of uniformly spaced samples, fourth order at every node.

    Even nodes carry the composite Simpson sum; odd nodes add a one-interval
    three-point rule to the preceding even node. ``len(values)`` must be odd.
    """
    f = np.asarray(values, dtype=float)
    n = len(f) - 1
    if n < 2 or n % 2:
        raise ValueError("cumulative_simpson needs an even number of panels")
    out = np.zeros(n + 1)
    pairs = h / 3.0 * (f[0:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
    out[2::2] = np.cumsum(pairs)
    out[1::2] = out[0:-2:2] + h / 12.0 * (5.0 * f[0:-2:2] + 8.0 * f[1:-1:2] - f[2::2])
    return out


def _golden(func: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Golden-section search for a minimizer of ``func`` on ``[a, b]``."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = func(d)
    return 0.5 * (a + b)


def _extremum(func: Callable, period: float, maximize: bool, n: int = SCAN_POINTS,
              tol: float = REFINE_TOL) -> float:
    """Grid scan over ``[0, period)`` followed by golden-section refinement."""
    sign = -1.0 if maximize else 1.0
    h = period / n
    t = np.arange(n) * h
    vals = sign * np.asarray(func(t), dtype=float)
    i = int(np.argmin(vals))
    best = float(vals[i])

    def scalar(s):
        return sign * float(np.asarray(func(np.array([s % period])))[0])

    s = _golden(scalar, t[i] - h, t[i] + h, tol)
    refined = scalar(s)
    return sign * min(best, refined)


def _ratio(f: PeriodicFn, g: PeriodicFn, n: int) -> Callable:
    p = f.period
    grid = np.arange(n) * (p / n)
    gv = np.asarray(g(grid))
    if np.min(gv) <= 1e-14:
        raise DivisorVanishes(f"divisor attains {np.min(gv):.3e} <= 1e-14 on the scan grid")

    def q(t):
        t = np.mod(np.asarray(t, dtype=float), p)
        return f._values(t) / g._values(t)

    return q


def sup_ratio(f: PeriodicFn, g: PeriodicFn, n: int = SCAN_POINTS) -> float:
    """Maximum of ``f(t)/g(t)`` over one period."""
    return _extremum(_ratio(f, g, n), f.period, maximize=True, n=n)


def inf_ratio(f: PeriodicFn, g: PeriodicFn, n: int = SCAN_POINTS) -> float:
    """Minimum of ``f(t)/g(t)`` over one period."""
    return _extremum(_ratio(f, g, n), f.period, maximize=False, n=n)


def as_periodic(x, period: float) -> PeriodicFn:
    if isinstance(x, PeriodicFn):
        return x
    return Constant(float(x), period)


def grid(period: float, n: int) -> np.ndarray:
    """``n + 1`` uniform nodes on ``[0, period]``."""
    return np.linspace(0.0, period, n + 1)


__all__: Sequence[str] = [
    "PeriodicFn", "Constant", "Harmonic", "Sampled", "Product", "LinearCombination",
    "evaluate", "average", "sup", "inf", "sup_ratio", "inf_ratio", "simpson_average",
]
