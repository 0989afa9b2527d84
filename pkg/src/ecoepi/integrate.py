"""Time integration with dense uniform-grid output, and monodromy matrices.

Two schemes are provided: an adaptive Dormand-Prince 5(4) pair with a
fourth-order continuous extension (the default), and classical fixed-step
RK4 used as a cross-check. Both accept states of shape ``(n,)`` or ``(n, m)``
so a whole grid of initial conditions can be advanced in one pass.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import model
from .errors import NonFiniteState, PositivityViolation, StepFailure
from .model import Coefficients

# Dormand-Prince tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40)
# continuous extension (Shampine 1986), y(t + s h) = y + h K^T P [s, s^2, s^3, s^4]
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

FIELD_KINDS = ("original", "log", "homotopy")
#: Largest tolerated excursion below zero for trajectories started in the positive cone.
POSITIVITY_TOL = -1e-9


@dataclass
class Trajectory:
    """Samples ``x[j]`` of the solution at strictly increasing times ``t[j]``."""

    t: np.ndarray
    x: np.ndarray
    method: str
    rtol: float | None = None
    atol: float | None = None
    h: float | None = None
    nsteps: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]

    def __len__(self):
        return len(self.t)


def sample_times(t0: float, t1: float, dt: float) -> np.ndarray:
    """Uniform grid from ``t0`` with spacing ``dt``, closed at ``t1``."""
    span = t1 - t0
    n = span / dt
    m = int(round(n))
    if m >= 1 and abs(n - m) < 1e-9 * max(1.0, n):
        return np.linspace(t0, t1, m + 1)
    ts = t0 + dt * np.arange(int(math.floor(n)) + 1)
    if t1 - ts[-1] > 1e-12 * max(1.0, abs(t1)):
        ts = np.append(ts, t1)
    return ts


def _rms(e, y, ynew, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
    return math.sqrt(float(np.mean((e / scale) ** 2)))


def dopri5(f: Callable, t0: float, y0, t1: float, t_eval, rtol: float = 1e-10,
           atol: float = 1e-10, h0: float | None = None, max_steps: int = 2_000_000):
    """Adaptive Dormand-Prince 5(4) integration of ``y' = f(t, y)``.

    Returns ``(states at t_eval, accepted step count)``. ``t_eval`` must be
    increasing, start at ``t0`` and end at ``t1``.
    """
    y = np.array(y0, dtype=float)
    t_eval = np.asarray(t_eval, dtype=float)
    out = np.empty((len(t_eval),) + y.shape)
    out[0] = y
    j = 1
    t = float(t0)
    k1 = np.asarray(f(t, y), dtype=float)
    if not np.all(np.isfinite(k1)):
        raise NonFiniteState(f"non-finite derivative at t={t}")
    span = t1 - t0
    if h0 is None:
        d0 = math.sqrt(float(np.mean((y / (atol + rtol * np.abs(y))) ** 2)))
        d1 = math.sqrt(float(np.mean((k1 / (atol + rtol * np.abs(y))) ** 2)))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, abs(span))
    else:
        h = h0
    hmin_rel = 16 * np.finfo(float).eps
    nsteps = 0
    while t < t1:
        if nsteps > max_steps:
            raise StepFailure(f"exceeded {max_steps} steps at t={t}")
        h = min(h, t1 - t)
        if h <= hmin_rel * max(1.0, abs(t)):
            raise StepFailure(f"step size underflow at t={t}")
        K = [k1]
        for i in range(1, 6):
            a = _A[i]
            yi = y + h * sum(a[m] * K[m] for m in range(i) if a[m] != 0.0)
            K.append(np.asarray(f(t + _C[i] * h, yi), dtype=float))
        ynew = y + h * (_B[0] * K[0] + _B[2] * K[2] + _B[3] * K[3] + _B[4] * K[4] + _B[5] * K[5])
        tnew = t + h if h < t1 - t else t1
        k7 = np.asarray(f(tnew, ynew), dtype=float)
        K.append(k7)
        err_vec = h * (_E[0] * K[0] + _E[2] * K[2] + _E[3] * K[3] + _E[4] * K[4]
                       + _E[5] * K[5] + _E[6] * K[6])
        if np.all(np.isfinite(ynew)) and np.all(np.isfinite(k7)):
            err = _rms(err_vec, y, ynew, rtol, atol)
        else:
            err = math.inf
        if err <= 1.0:
            nsteps += 1
            # dense output for samples inside (t, tnew]
            if j < len(t_eval) and t_eval[j] <= tnew:
                Q = np.tensordot(_P.T, np.array(K), axes=(1, 0))  # (4, ...)
                while j < len(t_eval) and t_eval[j] <= tnew:
                    if t_eval[j] == tnew:
                        out[j] = ynew
                    else:
                        s = (t_eval[j] - t) / h
                        out[j] = y + h * (s * Q[0] + s**2 * Q[1] + s**3 * Q[2] + s**4 * Q[3])
                    j += 1
            t, y, k1 = tnew, ynew, k7
            fac = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** -0.2)
            h *= fac
        else:
            fac = 0.2 if not math.isfinite(err) else max(0.2, 0.9 * err ** -0.2)
            h *= fac
    if not np.all(np.isfinite(y)):
        raise NonFiniteState(f"non-finite state at t={t}")
    return out, nsteps


def rk4(f: Callable, t0: float, y0, t1: float, t_eval, h: float):
    """Classical RK4 with step at most ``h``, landing exactly on every sample time."""
    y = np.array(y0, dtype=float)
    t_eval = np.asarray(t_eval, dtype=float)
    out = np.empty((len(t_eval),) + y.shape)
    out[0] = y
    nsteps = 0
    for j in range(1, len(t_eval)):
        ta, tb = t_eval[j - 1], t_eval[j]
        m = max(1, int(math.ceil((tb - ta) / h - 1e-9)))
        hh = (tb - ta) / m
        for i in range(m):
            t = ta + i * hh
            k1 = f(t, y)
            k2 = f(t + hh / 2, y + hh / 2 * k1)
            k3 = f(t + hh / 2, y + hh / 2 * k2)
            k4 = f(t + hh, y + hh * k3)
            y = y + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        nsteps += m
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(f"non-finite state at t={tb}")
        out[j] = y
    return out, nsteps


def rhs(kind: str, params: Coefficients, lam: float = 1.0) -> Callable:
    """The right-hand side ``f(t, x)`` for one of the three field kinds."""
    if kind == "original":
        return lambda t, x: model.field(params, t, x)
    if kind == "log":
        return lambda t, u: model.log_field(params, t, u)
    if kind == "homotopy":
        model.homotopy_field(params, lam, 0.0, np.zeros(3))  # validates lam
        return lambda t, u: model.homotopy_field(params, lam, t, u)
    raise ValueError(f"unknown field kind {kind!r}; expected one of {FIELD_KINDS}")


def integrate(kind: str, params: Coefficients, t0: float, x0, t1: float, *,
              method: str = "dopri5", rtol: float = 1e-10, atol: float = 1e-10,
              h: float | None = None, dt: float | None = None, lam: float = 1.0,
              t_eval=None, check_positivity: bool = True) -> Trajectory:
    """Integrate a field from ``(t0, x0)`` to ``t1``.

    Output is sampled every ``dt`` (default period/200). ``method`` is
    ``"dopri5"`` (adaptive) or ``"rk4"`` (fixed step ``h``, default
    period/2000).
    """
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    omega = params.period
    f = rhs(kind, params, lam)
    if t_eval is None:
        t_eval = sample_times(t0, t1, omega / 200 if dt is None else dt)
    if method == "dopri5":
        x, n = dopri5(f, t0, x0, t1, t_eval, rtol=rtol, atol=atol)
        traj = Trajectory(np.asarray(t_eval), x, method, rtol=rtol, atol=atol, nsteps=n)
    elif method == "rk4":
        step = omega / 2000 if h is None else h
        x, n = rk4(f, t0, x0, t1, t_eval, step)
        traj = Trajectory(np.asarray(t_eval), x, method, h=step, nsteps=n)
    else:
        raise ValueError(f"unknown method {method!r}")
    if kind == "original" and check_positivity and np.all(np.asarray(x0) >= 0):
        lo = float(np.min(traj.x))
        if lo < POSITIVITY_TOL:
            raise PositivityViolation(f"state component reached {lo:.3e} < {POSITIVITY_TOL}")
    return traj


# --------------------------------------------------------------------------
# monodromy


@dataclass
class Monodromy:
    matrix: np.ndarray
    multipliers: np.ndarray
    final_state: np.ndarray
    trace_integral: float
    t0: float
    period: float

    @property
    def liouville_error(self) -> float:
        """Relative mismatch between det(Phi) and exp(integral of trace J)."""
        ref = math.exp(self.trace_integral)
        return abs(float(np.linalg.det(self.matrix)) - ref) / ref


def variational_rhs(params: Coefficients) -> Callable:
    def f(t, z):
        x = z[:3]
        phi = z[3:12].reshape(3, 3)
        J = model.jacobian(params, t, x)
        out = np.empty(13)
        out[:3] = model.field(params, t, x)
        out[3:12] = (J @ phi).ravel()
        out[12] = model.trace_jacobian(params, t, x)
        return out

    return f


def monodromy(params: Coefficients, x0, t0: float = 0.0, *, rtol: float = 1e-11,
              atol: float = 1e-12) -> Monodromy:
    """Integrate the state jointly with its variational equation over one period."""
    omega = params.period
    z0 = np.zeros(13)
    z0[:3] = x0
    z0[3:12] = np.eye(3).ravel()
    zs, _ = dopri5(variational_rhs(params), t0, z0, t0 + omega, [t0, t0 + omega],
                   rtol=rtol, atol=atol)
    z = zs[-1]
    phi = z[3:12].reshape(3, 3)
    return Monodromy(phi, eig3(phi), z[:3].copy(), float(z[12]), t0, omega)


# --------------------------------------------------------------------------
# 3x3 eigenvalues


def _cubic_roots(a: float, b: float, c: float) -> list[complex]:
    """Roots of ``x^3 + a x^2 + b x + c`` by Cardano's formula, Newton-polished."""
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    sq = cmath.sqrt(disc)
    # pick the branch that avoids cancellation
    w = -q / 2.0 + sq if abs(-q / 2.0 + sq) >= abs(-q / 2.0 - sq) else -q / 2.0 - sq
    roots = []
    if abs(w) == 0.0:
        roots = [complex(-a / 3.0)] * 3
    else:
        C = w ** (1.0 / 3.0)
        unit = complex(-0.5, math.sqrt(3.0) / 2.0)
        for kk in range(3):
            Ck = C * unit**kk
            roots.append(Ck - p / (3.0 * Ck) - a / 3.0)

    def poly(z):
        return ((z + a) * z + b) * z + c

    def dpoly(z):
        return (3.0 * z + 2.0 * a) * z + b

    polished = []
    for z in roots:
        for _ in range(3):
            d = dpoly(z)
            if d == 0:
                break
            znew = z - poly(z) / d
            if abs(poly(znew)) >= abs(poly(z)):
                break
            z = znew
        polished.append(z)
    return polished


def eig3(M) -> np.ndarray:
    """Eigenvalues of a real 3x3 matrix via its characteristic polynomial.

    Returned as a complex array sorted by decreasing modulus; conjugate pairs
    are symmetrized and numerically real roots are returned with zero
    imaginary part.
    """
    M = np.asarray(M, dtype=float)
    tr = M[0, 0] + M[1, 1] + M[2, 2]
    minors = (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
              + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
              + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
    det = float(np.linalg.det(M))
    roots = _cubic_roots(-tr, minors, -det)
    scale = max(1.0, max(abs(z) for z in roots))
    cleaned = []
    for z in roots:
        if abs(z.imag) <= 1e-12 * scale:
            z = complex(z.real, 0.0)
        cleaned.append(z)
    cx = [z for z in cleaned if z.imag != 0.0]
    if len(cx) == 2:
        re = 0.5 * (cx[0].real + cx[1].real)
        im = 0.5 * (abs(cx[0].imag) + abs(cx[1].imag))
        cleaned = [z for z in cleaned if z.imag == 0.0] + [complex(re, im), complex(re, -im)]
    return np.array(sorted(cleaned, key=lambda z: (-abs(z), -z.imag)), dtype=complex)
