r"""
Closed-form solutions of the sublinear-mobility vortex equation
================================================================

Explicit solutions used as analytic references throughout the package:

* the space-constant *friendly giant* ``(u0^{-a} + a t)^{-1/a}``;
* the self-similar profile ``F_M`` and solution ``U_M`` of total mass ``M``;
* the mass function ``G_M`` of the self-similar profile;
* the ``alpha -> 1`` expanding disk vortex.

Radial quantities are expressed either in the radius ``r`` or in the volume
coordinate ``rho = omega_d r^d``; :func:`volume_coord` and
:func:`radius_coord` convert between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "ConvergenceError",
    "MobilityExponent",
    "SelfSimilarParams",
    "check_alpha",
    "unit_ball_volume",
    "volume_coord",
    "radius_coord",
    "friendly_giant",
    "profile_F",
    "self_similar_u",
    "self_similar_mass",
    "profile_mass_quadrature",
    "adaptive_simpson",
    "vortex_limit_u",
    "ProfileSamples",
    "profile_ode_rhs",
    "profile_ode_oracle",
]


class ConvergenceError(RuntimeError):
    """An iterative procedure did not reach its tolerance."""


class MobilityExponent(float):
    """Exponent of the mobility ``u^alpha``; construction enforces ``0 < alpha < 1``."""

    def __new__(cls, alpha):
        value = float(alpha)
        if not 0.0 < value < 1.0:
            raise ValueError(f"alpha outside (0,1): {value!r}")
        return super().__new__(cls, value)


def check_alpha(alpha: float) -> float:
    """Return ``alpha`` as a plain float, rejecting values outside ``(0, 1)``."""
    return float(MobilityExponent(alpha))


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball of R^d, ``pi^{d/2} / Gamma(d/2 + 1)``."""
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def volume_coord(r, d: int):
    """Volume ``omega_d r^d`` of the ball of radius ``r``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    out = unit_ball_volume(d) * r**d
    return out[()] if out.ndim == 0 else out


def radius_coord(rho, d: int):
    """Inverse of :func:`volume_coord`."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("volume coordinate must be non-negative")
    out = (rho / unit_ball_volume(d)) ** (1.0 / d)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SelfSimilarParams:
    """Parameters of the self-similar solution of mass ``mass`` in R^``dim``."""

    alpha: float
    mass: float = 1.0
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not self.mass > 0 or not math.isfinite(self.mass):
            raise ValueError(f"mass must be positive and finite, got {self.mass!r}")
        unit_ball_volume(self.dim)

    @property
    def omega(self) -> float:
        return unit_ball_volume(self.dim)

    @property
    def p(self) -> float:
        """Exponent of ``F = w^p``, ``1/(1-alpha)``."""
        return 1.0 / (1.0 - self.alpha)

    @property
    def beta(self) -> float:
        """Spatial scaling exponent ``1/(alpha d)``."""
        return 1.0 / (self.alpha * self.dim)

    @property
    def gamma(self) -> float:
        """Temporal decay exponent ``1/alpha``."""
        return 1.0 / self.alpha

    @property
    def w_star(self) -> float:
        """Equilibrium of the radial profile ODE, ``alpha^{-(1-alpha)/alpha}``."""
        return self.alpha ** (-(1.0 - self.alpha) / self.alpha)


def _scalar(out):
    return out[()] if np.ndim(out) == 0 else out


def friendly_giant(u0_sup, alpha: float, t, *, infinite: bool = False):
    """Space-constant solution ``(u0^{-alpha} + alpha t)^{-1/alpha}``.

    With ``infinite=True`` the initial sup is taken to be infinite and the
    global supersolution ``(alpha t)^{-1/alpha}`` is returned; it is
    unbounded at ``t = 0``.
    """
    alpha = check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    if infinite:
        if np.any(t == 0):
            raise ValueError("the infinite friendly giant is unbounded at t=0")
        return _scalar((alpha * t) ** (-1.0 / alpha))
    u0_sup = float(u0_sup)
    if u0_sup < 0 or not math.isfinite(u0_sup):
        raise ValueError("u0_sup must be finite and non-negative; use infinite=True")
    if u0_sup == 0:
        if np.any(t == 0):
            raise ValueError("friendly giant with u0_sup=0 is undefined at t=0")
        # u0^{-alpha} = +inf, the solution stays at zero
        return _scalar(np.zeros_like(t))
    return _scalar((u0_sup ** (-alpha) + alpha * t) ** (-1.0 / alpha))


def profile_F(params: SelfSimilarParams, y_abs):
    """Self-similar profile ``F_M(|y|)``."""
    a = params.alpha
    y = np.asarray(y_abs, dtype=float)
    if np.any(y < 0):
        raise ValueError("y_abs must be non-negative")
    s = params.omega * y**params.dim / (a * params.mass)
    return _scalar((s ** (a / (1 - a)) + a) ** (-1.0 / a))


def self_similar_u(params: SelfSimilarParams, t, x_abs):
    """Self-similar solution ``U_M(t, x)`` of mass ``M``."""
    a = params.alpha
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    x = np.asarray(x_abs, dtype=float)
    s = params.omega * x**params.dim * t ** (-1.0 / a) / (a * params.mass)
    return _scalar(t ** (-1.0 / a) * (a + s ** (a / (1 - a))) ** (-1.0 / a))


def self_similar_mass(params: SelfSimilarParams, kappa):
    """Mass ``G_M(kappa)`` of ``F_M`` inside the ball of volume ``kappa``.

    Uses the closed form ``M (V/(1+V))^{(1-a)/a}`` with
    ``V = (kappa/(a M))^{a/(1-a)} / a``, which follows from the substitution
    ``sigma = a M (a v)^{(1-a)/a}`` in the defining integral.
    """
    a = params.alpha
    k = np.asarray(kappa, dtype=float)
    if np.any(k < 0):
        raise ValueError("kappa must be non-negative")
    V = (k / (a * params.mass)) ** (a / (1 - a)) / a
    with np.errstate(invalid="ignore"):
        ratio = np.where(np.isinf(V), 1.0, V / (1.0 + V))
    return _scalar(params.mass * ratio ** ((1 - a) / a))


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature of a scalar function on ``[a, b]``."""

    def simpson(fa, fm, fb, h):
        return h * (fa + 4 * fm + fb) / 6

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if abs(delta) <= 15 * tol:
            return left + right + delta / 15
        if depth >= max_depth:
            raise ConvergenceError(f"adaptive Simpson exceeded depth {max_depth} near {m!r}")
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth + 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth + 1
        )

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0)


def profile_mass_quadrature(params: SelfSimilarParams, kappa=math.inf, tol: float = 1e-10) -> float:
    """Integral of ``F_M`` over the ball of volume ``kappa`` by quadrature.

    Works in the volume coordinate, where the integrand is
    ``((s/(aM))^{a/(1-a)} + a)^{-1/a}``. The part beyond the cut ``s*`` is
    integrated term by term from the binomial series of the power tail,
    which converges once ``a (s*/(aM))^{-a/(1-a)} <= 1/2``.
    """
    a, M = params.alpha, params.mass
    q = a / (1 - a)
    p = 1 / (1 - a)

    def f(s):
        return ((s / (a * M)) ** q + a) ** (-1 / a)

    def g(tau):
        # s = tau^4 removes the s^q cusp at the origin
        return 4 * tau**3 * f(tau**4)

    # s* where the series ratio a x^{-q} equals 1/2
    s_cut = a * M * (2 * a) ** (1 / q)
    if kappa <= s_cut:
        return adaptive_simpson(g, 0.0, float(kappa) ** 0.25, tol / 2)
    body = adaptive_simpson(g, 0.0, s_cut**0.25, tol / 2)

    # tail: f = (aM) x^{-p} sum_k binom(-1/a, k) a^k x^{-kq} with x = s/(aM)
    def tail_from(x0):
        total, coef, k = 0.0, 1.0, 0
        while True:
            term = coef * a**k * x0 ** (1 - p - k * q) / (p + k * q - 1)
            total += term
            if abs(term) < tol * 1e-3 and k > 0:
                return a * M * total
            coef *= (-1 / a - k) / (k + 1)
            k += 1
            if k > 10_000:
                raise ConvergenceError("tail series did not converge")

    x_cut = s_cut / (a * M)
    tail = tail_from(x_cut)
    if math.isfinite(kappa):
        tail -= tail_from(kappa / (a * M))
    return body + tail


def vortex_limit_u(M: float, d: int, t, x_abs):
    """Disk vortex ``1/t`` on the ball of volume ``M t``, obtained as alpha -> 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    rho = volume_coord(x_abs, d)
    return _scalar(np.where(rho <= M * t, 1.0 / t, 0.0))


# -- ODE oracle for the profile ------------------------------------------------


@dataclass(frozen=True)
class ProfileSamples:
    """Profile obtained by integrating the radial ODE, after mass normalisation."""

    r: np.ndarray
    F: np.ndarray
    mass_before_normalisation: float
    scale: float


def profile_ode_rhs(params: SelfSimilarParams, r, w):
    """Right-hand side ``w'(r)`` of ``r w' = a d w^p - d w``."""
    a, d = params.alpha, params.dim
    return (a * d * w**params.p - d * w) / r


def _integrate_profile(params, s0, s1, w0, rtol):
    # in s = log r and v = log w the ODE is autonomous and free of underflow;
    # the volume-coordinate mass rides along: dm/ds = F * d * omega * r^d
    a, d, p, om = params.alpha, params.dim, params.p, params.omega

    def rhs(s, y):
        v = y[0]
        return [d * (a * math.exp((p - 1) * v) - 1), d * om * math.exp(p * v + d * s)]

    m0 = w0**p * om * math.exp(d * s0)
    sol = solve_ivp(
        rhs, (s0, s1), [math.log(w0), m0], method="DOP853", rtol=rtol, atol=1e-14, dense_output=True
    )
    if not sol.success:
        raise ConvergenceError(sol.message)
    return sol


def profile_ode_oracle(
    params: SelfSimilarParams,
    r_max: float,
    tol: float = 1e-8,
    n_samples: int = 400,
    max_iter: int = 30,
) -> ProfileSamples:
    """Profile ``F = w^p`` from numerical integration of the radial ODE.

    The trajectory leaves the corner ``w_*`` (perturbed into ``0 < w < w_*``);
    the free constant is fixed by rescaling ``r`` so that the total mass,
    accumulated along the integration plus an analytic power tail beyond the
    last point, equals ``params.mass``. The integration is extended until
    successive scale factors agree to ``tol``.
    """
    if not r_max > 0 or not tol > 0:
        raise ValueError("r_max and tol must be positive")
    d, p = params.dim, params.p
    w0 = params.w_star * (1 - 1e-10)
    # near w_* deviations grow like r^{d a/(1-a)}; start early enough that
    # the departure from the corner happens around r ~ 1
    s0 = -math.log(1e10) / (d * (p - 1)) - 2.0
    s_end = math.log(r_max) + 4.0
    prev = None
    for _ in range(max_iter):
        sol = _integrate_profile(params, s0, s_end, w0, rtol=1e-13)
        v_end, m_end = sol.y[0, -1], sol.y[1, -1]
        # F ~ K r^{-dp}: tail mass omega K r^{d(1-p)} / (p-1), K from the endpoint
        tail = params.omega * math.exp(p * v_end + d * s_end) / (p - 1)
        mass = m_end + tail
        scale = (params.mass / mass) ** (1 / d)
        if prev is not None and abs(scale - prev) <= tol * scale:
            break
        prev = scale
        s_end += 8.0
    else:
        raise ConvergenceError("profile ODE oracle did not reach the requested tolerance")
    r = np.geomspace(r_max * 1e-4, r_max, n_samples)
    s = np.log(r / scale)
    v = np.empty_like(s)
    fwd = s >= s0
    v[fwd] = sol.sol(s[fwd])[0]
    if not fwd.all():
        # samples before the start point: integrate back towards the corner
        back = _integrate_profile(params, s0, s[0] - 1.0, w0, rtol=1e-13)
        v[~fwd] = back.sol(s[~fwd])[0]
    w = np.exp(v)
    return ProfileSamples(r=r, F=w**p, mass_before_normalisation=mass, scale=scale)
