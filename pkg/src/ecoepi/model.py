"""Vector fields of the eco-epidemic system with disease in the prey.

State ordering is always ``(S, I, Y)``: susceptible prey, infected prey,
predators. All fields accept a state array of shape ``(3,)`` or ``(3, m)``
(a batch of ``m`` states) and broadcast over the trailing axis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import LambdaOutOfRange, ValidationError
from .periodic import Constant, Harmonic, PeriodicFn, _same_period

#: Coefficients required nonnegative (r may change sign).
NONNEGATIVE = ("Lambda", "beta", "mu", "c", "eta", "k", "b")
#: Coefficients required to have positive average.
POSITIVE_AVERAGE = ("Lambda", "mu", "r", "b", "beta")
#: Display names used in diagnostics.
SYMBOL = {"Lambda": "Λ", "beta": "β", "mu": "μ", "c": "c", "eta": "η", "k": "k",
          "r": "r", "b": "b"}


class State(NamedTuple):
    S: float
    I: float
    Y: float


class LogState(NamedTuple):
    u1: float
    u2: float
    u3: float


class ConditionWarning(UserWarning):
    """Positive-average condition violated; the run continues unless strict."""


@dataclass(frozen=True)
class Coefficients:
    """The eight periodic coefficients of the model, sharing one period."""

    Lambda: PeriodicFn
    beta: PeriodicFn
    mu: PeriodicFn
    c: PeriodicFn
    eta: PeriodicFn
    k: PeriodicFn
    r: PeriodicFn
    b: PeriodicFn

    def __post_init__(self):
        p = self.Lambda.period
        bad = [f.name for f in fields(self) if not _same_period(getattr(self, f.name).period, p)]
        if bad:
            raise ValidationError(f"coefficients {bad} do not share period {p}")

    @property
    def period(self) -> float:
        return self.Lambda.period

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def replace(self, **changes) -> "Coefficients":
        kw = dict(self.items())
        kw.update(changes)
        return Coefficients(**kw)

    def check(self, strict: bool = False) -> list[str]:
        """Validate the positivity and positive-average conditions.

        Nonnegativity violations always raise :class:`ValidationError`.
        Positive-average violations are returned as diagnostics and emitted
        as :class:`ConditionWarning`, or raised when ``strict``.
        """
        errors = []
        for name in NONNEGATIVE:
            fn = getattr(self, name)
            lo = fn.inf()
            if lo < -1e-12 * max(1.0, abs(fn.sup())):
                errors.append(f"condition C1: {SYMBOL[name]} must be nonnegative (min {lo:.6g})")
        if errors:
            raise ValidationError("; ".join(errors))
        diagnostics = []
        for name in POSITIVE_AVERAGE:
            avg = getattr(self, name).average()
            if not avg > 0:
                diagnostics.append(f"condition C2: average of {SYMBOL[name]} is {avg:.6g}, not > 0")
        if diagnostics:
            if strict:
                raise ValidationError("; ".join(diagnostics))
            for d in diagnostics:
                warnings.warn(d, ConditionWarning, stacklevel=2)
        return diagnostics

    @cached_property
    def _harmonic_table(self):
        rows = []
        for _, fn in self.items():
            if isinstance(fn, Constant):
                rows.append((fn.value, 0.0, 0.0))
            elif isinstance(fn, Harmonic):
                rows.append((fn.base, fn.amp, fn.phase))
            else:
                return None
        return tuple(rows)

    def at(self, t: float):
        """Tuple ``(Λ, β, μ, c, η, k, r, b)`` evaluated at time ``t``."""
        table = self._harmonic_table
        if table is not None and np.ndim(t) == 0:
            arg = 2.0 * math.pi * float(t) / self.period
            return tuple(b if a == 0.0 else b * (1.0 + a * math.cos(ph + arg))
                         for b, a, ph in table)
        return tuple(fn(t) for _, fn in self.items())


def field(params: Coefficients, t: float, x) -> np.ndarray:
    """Right-hand side of the original system in ``(S, I, Y)``."""
    lam, beta, mu, c, eta, k, r, b = params.at(t)
    S, I, Y = np.asarray(x, dtype=float)
    inc = beta * S * I
    return np.array([
        lam - inc - mu * S,
        inc - c * I - eta * Y * I,
        Y * (r - b * Y + k * eta * I),
    ])


def log_field(params: Coefficients, t: float, u) -> np.ndarray:
    """Right-hand side after substituting ``S, I, Y = exp(u1), exp(u2), exp(u3)``."""
    lam, beta, mu, c, eta, k, r, b = params.at(t)
    u1, u2, u3 = np.asarray(u, dtype=float)
    e1, e2, e3 = np.exp(u1), np.exp(u2), np.exp(u3)
    return np.array([
        lam / e1 - beta * e2 - mu,
        beta * e1 - c - eta * e3,
        r - b * e3 + k * eta * e2,
    ])


def homotopy_field(params: Coefficients, lam: float, t: float, u) -> np.ndarray:
    """The log field scaled by the continuation parameter ``lam`` in (0, 1]."""
    if not 0.0 < lam <= 1.0:
        raise LambdaOutOfRange(f"homotopy parameter must lie in (0, 1], got {lam}")
    return lam * log_field(params, t, u)


def jacobian(params: Coefficients, t: float, x) -> np.ndarray:
    """Exact derivative of :func:`field` with respect to ``(S, I, Y)``."""
    lam, beta, mu, c, eta, k, r, b = params.at(t)
    S, I, Y = np.asarray(x, dtype=float)
    z = np.zeros_like(S)
    return np.array([
        [-beta * I - mu, -beta * S, z],
        [beta * I, beta * S - c - eta * Y, -eta * I],
        [z, k * eta * Y, r - 2.0 * b * Y + k * eta * I],
    ], dtype=float)


def trace_jacobian(params: Coefficients, t: float, x) -> np.ndarray:
    lam, beta, mu, c, eta, k, r, b = params.at(t)
    S, I, Y = np.asarray(x, dtype=float)
    return (-beta * I - mu) + (beta * S - c - eta * Y) + (r - 2.0 * b * Y + k * eta * I)
