r"""
Shocks for piecewise non-increasing radial data
===============================================

Where characteristics cross, a shock ``rho = S(t)`` separates two classical
solutions. Continuity of the mass across it gives the Rankine-Hugoniot law

.. math::

    S'(t) = m(t, S)\, \frac{u_l^a - u_r^a}{u_l - u_r},

with ``u_l`` the state on the left (inner) side and ``u_r`` on the right.
This module integrates that law with fixed-step RK4 for the two-bump datum
``c1 1_[0,1] + c2 1_[a,b]``, builds the pasted weak solution, provides the
mass-conserving but inadmissible shock for square data, and checks the
Lax-Oleinik condition along a path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .characteristics import square_rarefaction_m, square_rarefaction_u
from .exact import check_alpha

__all__ = [
    "ShockIntegrationError",
    "ShockPath",
    "TwoBumpParams",
    "rh_speed",
    "rh_residual",
    "rk4_integrate",
    "SpuriousSquare",
    "spurious_square",
    "TwoBumpSolution",
    "two_bump_solve",
    "LaxOleinikReport",
    "lax_oleinik_check",
]


class ShockIntegrationError(RuntimeError):
    """The shock ODE could not be advanced."""


def _pow_neg(u, e):
    # u^e for e < 0 with the convention 0^e = +inf
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(u > 0, u**e, np.inf)


def rh_speed(m, u_plus, u_minus, alpha: float):
    """Shock speed ``m (u+^a - u-^a)/(u+ - u-)``.

    ``u_plus`` is the state inside the shock, ``u_minus`` outside. Equal
    states give the characteristic speed ``a u^{a-1} m``; both states zero
    give 0.
    """
    alpha = check_alpha(alpha)
    m, up, um = (np.asarray(x, dtype=float) for x in (m, u_plus, u_minus))
    if np.any(m < 0) or np.any(up < 0) or np.any(um < 0):
        raise ValueError("mass and states must be non-negative")
    up, um, m = np.broadcast_arrays(up, um, m)
    diff = up - um
    scale = np.maximum(up, um)
    close = np.abs(diff) <= 1e-12 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = (up**alpha - um**alpha) / diff
        # mean value at the midpoint; exact to O(diff^2) on the diagonal
        mid = 0.5 * (up + um)
        limit = alpha * mid ** (alpha - 1)
    out = np.where(close, np.where(scale > 0, m * limit, 0.0), m * quotient)
    return out[()] if out.ndim == 0 else out


def rh_residual(speed, m, u_left, u_right, alpha: float):
    """``|S' [u] - m [u^a]|`` for a path sample."""
    return np.abs(np.asarray(speed) * (np.asarray(u_left) - u_right) - np.asarray(m) * (np.asarray(u_left) ** alpha - np.asarray(u_right) ** alpha))


@dataclass
class ShockPath:
    """Sampled shock curve ``t -> S(t)``.

    ``error_estimate`` is the step-halving estimate ``max |S_h - S_{h/2}| / 15``
    when available.
    """

    times: np.ndarray
    positions: np.ndarray
    speeds: np.ndarray
    h: float
    params: object = None
    error_estimate: float | None = None

    def __post_init__(self):
        self._spline = None

    def __call__(self, t):
        """Position at arbitrary ``t`` by cubic Hermite interpolation."""
        if self._spline is None:
            self._spline = CubicHermiteSpline(self.times, self.positions, self.speeds)
        out = self._spline(np.asarray(t, dtype=float))
        return out[()] if np.ndim(out) == 0 else out


def _rk4_run(rhs, S0, t_end, n, check=None):
    h = t_end / n
    t = np.linspace(0.0, t_end, n + 1)
    S = np.empty(n + 1)
    V = np.empty(n + 1)
    S[0] = S0

    def f(tt, ss):
        try:
            val = float(rhs(tt, ss))
        except (ArithmeticError, ValueError) as exc:
            raise ShockIntegrationError(f"rhs failed at t={tt!r}, S={ss!r}: {exc}") from exc
        if not math.isfinite(val):
            raise ShockIntegrationError(f"non-finite speed at t={tt!r}, S={ss!r}")
        return val

    for k in range(n):
        tk, sk = t[k], S[k]
        k1 = f(tk, sk)
        V[k] = k1
        k2 = f(tk + h / 2, sk + h / 2 * k1)
        k3 = f(tk + h / 2, sk + h / 2 * k2)
        k4 = f(tk + h, sk + h * k3)
        S[k + 1] = sk + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not math.isfinite(S[k + 1]):
            raise ShockIntegrationError(f"non-finite state at t={t[k + 1]!r}")
        if check is not None:
            check(t[k + 1], S[k + 1])
    V[n] = f(t[n], S[n])
    return t, S, V


def rk4_integrate(rhs, S0: float, t_end: float, h: float, *, estimate_error: bool = True, check=None) -> ShockPath:
    """Classical fixed-step RK4 for ``S' = rhs(t, S)`` on ``[0, t_end]``.

    The step is shrunk so that it divides ``t_end``. With ``estimate_error``
    the run is repeated at ``h/2`` and the Richardson difference is attached.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if not t_end >= 0:
        raise ValueError("t_end must be non-negative")
    n = max(1, int(math.ceil(t_end / h - 1e-9)))
    t, S, V = _rk4_run(rhs, S0, t_end, n, check)
    err = None
    if estimate_error:
        _, S2, _ = _rk4_run(rhs, S0, t_end, 2 * n, check)
        err = float(np.max(np.abs(S - S2[::2])) / 15)
    return ShockPath(t, S, V, t_end / n, error_estimate=err)


# -- square data: the inadmissible shock ---------------------------------------


@dataclass(frozen=True)
class SpuriousSquare:
    """Weak solution ``u = (c0^{-a} + a t)^{-1/a}`` on ``[0, S(t))``, zero beyond.

    ``S(t) = L c0 (c0^{-a} + a t)^{1/a}`` keeps the total mass at ``c0 L``.
    """

    c0: float
    L: float
    alpha: float

    def flat(self, t):
        return (self.c0 ** (-self.alpha) + self.alpha * np.asarray(t, dtype=float)) ** (-1 / self.alpha)

    def S(self, t):
        return self.L * self.c0 * (self.c0 ** (-self.alpha) + self.alpha * np.asarray(t, dtype=float)) ** (1 / self.alpha)

    def dS(self, t):
        return self.S(t) / (self.c0 ** (-self.alpha) + self.alpha * np.asarray(t, dtype=float))

    def u(self, t, rho):
        rho = np.asarray(rho, dtype=float)
        return np.where(rho < self.S(t), self.flat(t), 0.0)

    def m(self, t, rho):
        rho = np.asarray(rho, dtype=float)
        return self.flat(t) * np.minimum(rho, self.S(t))

    def u_left(self, t):
        return self.flat(t)

    def u_right(self, t):
        return 0.0 * np.asarray(t, dtype=float)

    def mass_at_shock(self, t):
        return self.flat(t) * self.S(t)

    def path(self, t_end: float, n: int = 100) -> ShockPath:
        t = np.linspace(0.0, t_end, n + 1)
        return ShockPath(t, self.S(t), self.dS(t), t_end / n, params=self)


def spurious_square(c0: float, L: float, alpha: float, t_end: float = 1.0, n: int = 100):
    """Shock path and pasted evaluator of the spurious square solution."""
    if not (c0 > 0 and L > 0):
        raise ValueError("c0 and L must be positive")
    sol = SpuriousSquare(float(c0), float(L), check_alpha(alpha))
    return sol.path(t_end, n), sol


# -- two bumps ------------------------------------------------------------------


@dataclass(frozen=True)
class TwoBumpParams:
    """Datum ``c1 1_[0,1] + c2 1_[a,b]`` with ``1 < a < b``."""

    c1: float
    c2: float
    a: float
    b: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("bump heights must be positive")
        if not 1 < self.a < self.b:
            raise ValueError("need 1 < a < b")

    @property
    def mass(self) -> float:
        return self.c1 + self.c2 * (self.b - self.a)

    def u0(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.where(rho <= 1, self.c1, 0.0) + np.where((rho >= self.a) & (rho <= self.b), self.c2, 0.0)

    def m0(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.c1 * np.clip(rho, 0, 1) + self.c2 * np.clip(rho - self.a, 0, self.b - self.a)


class TwoBumpSolution:
    """Pasted weak solution: inner square fan left of ``S``, outer bump right."""

    def __init__(self, params: TwoBumpParams, path: ShockPath):
        self.params = params
        self.path = path

    # inner solution: fan of c1 1_[0,1]
    def u1(self, t, rho):
        p = self.params
        return square_rarefaction_u(p.c1, 1.0, p.alpha, t, rho)

    def m1(self, t, rho):
        p = self.params
        return square_rarefaction_m(p.c1, 1.0, p.alpha, t, rho)

    # outer solution: characteristics of the second bump carrying the inner mass c1
    def _outer(self, t, rho):
        p = self.params
        al, c1, c2, a, b = p.alpha, p.c1, p.c2, p.a, p.b
        t = float(t)
        rho = np.asarray(rho, dtype=float)
        flat = (c2 ** (-al) + al * t) ** (-1 / al)
        junction = b + al * p.mass * c2 ** (al - 1) * t
        # flat zone: rho = rho0 + a c2^{a-1} (c1 + c2 (rho0 - a)) t
        k = al * c2 ** (al - 1) * t
        rho0 = (rho - k * (c1 - c2 * a)) / (1 + k * c2)
        m_flat = (c1 + c2 * (rho0 - a)) * (1 + al * c2**al * t) ** (1 - 1 / al)
        if t == 0.0:
            return np.where(rho <= b, c2, 0.0), np.minimum(p.m0(rho), p.mass)
        with np.errstate(invalid="ignore", divide="ignore"):
            Xq = (np.maximum(rho - b, 0.0) / (al * p.mass * t)) ** (al / (1 - al))
            u_fan = (Xq + al * t) ** (-1 / al)
            m_fan = p.mass * (Xq / (Xq + al * t)) ** (1 / al - 1)
        fan = rho > junction
        return np.where(fan, u_fan, flat), np.where(fan, m_fan, m_flat)

    def u2(self, t, rho):
        return self._outer(t, rho)[0]

    def m2(self, t, rho):
        return self._outer(t, rho)[1]

    def S(self, t):
        return self.path(t)

    def u(self, t, rho):
        rho = np.asarray(rho, dtype=float)
        return np.where(rho < self.S(t), self.u1(t, rho), self.u2(t, rho))

    def m(self, t, rho):
        rho = np.asarray(rho, dtype=float)
        return np.where(rho < self.S(t), self.m1(t, rho), self.m2(t, rho))

    def u_left(self, t):
        return self.u1(t, self.S(t))

    def u_right(self, t):
        return self.u2(t, self.S(t))

    def mass_at_shock(self, t):
        return self.m1(t, self.S(t))

    def outer_left_edge(self, t):
        """Position of the characteristic leaving ``rho0 = a``."""
        p = self.params
        return p.a + p.alpha * p.c1 * p.c2 ** (p.alpha - 1) * t


def two_bump_solve(params: TwoBumpParams, t_end: float, h: float) -> tuple[ShockPath, TwoBumpSolution]:
    """Integrate the Rankine-Hugoniot ODE from ``S(0) = a``.

    The inner mass ``m1(t, S)`` supplies ``m`` in the speed law. The outer
    formulas are only valid right of the characteristic leaving ``a``; a
    path that falls behind it signals a step too large for the data.
    """
    shell = TwoBumpSolution(params, None)

    def rhs(t, S):
        u1 = float(shell.u1(t, S))
        u2 = float(shell.u2(t, S))
        m = float(shell.m1(t, S))
        return float(rh_speed(m, u1, u2, params.alpha))

    def check(t, S):
        if S < shell.outer_left_edge(t) - 1e-12:
            raise ShockIntegrationError(
                f"shock at {S!r} fell behind the outer bump's first characteristic at t={t!r}; reduce h"
            )

    path = rk4_integrate(rhs, params.a, t_end, h, check=check)
    path.params = params
    return path, TwoBumpSolution(params, path)


# -- admissibility -----------------------------------------------------------------


@dataclass
class LaxOleinikReport:
    times: np.ndarray
    left_speed: np.ndarray
    shock_speed: np.ndarray
    right_speed: np.ndarray
    passed: np.ndarray = field(default=None)

    @property
    def all_passed(self) -> bool:
        return bool(np.all(self.passed))

    @property
    def none_passed(self) -> bool:
        return not bool(np.any(self.passed))


def lax_oleinik_check(solution, path: ShockPath, alpha: float, rtol: float = 1e-10) -> LaxOleinikReport:
    """Check ``a m u_l^{a-1} >= S' >= a m u_r^{a-1}`` at every path sample.

    ``solution`` provides ``u_left(t)``, ``u_right(t)`` and
    ``mass_at_shock(t)``; ``0^{a-1}`` counts as ``+inf``. Samples at ``t = 0``
    where the mass at the shock vanishes are still evaluated.
    """
    alpha = check_alpha(alpha)
    t = np.asarray(path.times, dtype=float)
    ul = np.array([float(solution.u_left(tt)) for tt in t])
    ur = np.array([float(solution.u_right(tt)) for tt in t])
    m = np.array([float(solution.mass_at_shock(tt)) for tt in t])
    with np.errstate(invalid="ignore"):
        left = alpha * m * _pow_neg(ul, alpha - 1)
        right = alpha * m * _pow_neg(ur, alpha - 1)
    sp = np.asarray(path.speeds, dtype=float)
    tol = rtol * np.maximum(np.abs(sp), 1e-300)
    passed = (left >= sp - tol) & (sp >= right - tol)
    return LaxOleinikReport(t, left, sp, right, passed)
