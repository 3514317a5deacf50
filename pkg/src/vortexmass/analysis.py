r"""
Rescaling, error metrics and property checks
============================================

Long-time behaviour is measured in the rescaled variables

.. math::

    w(t, y) = t^{1/a}\, u(t, t^{1/(d a)} y),

in which the self-similar solution is the fixed profile ``F_M``. The mass
counterpart is ``m(t, t^{1/a} kappa)`` against ``G_M(kappa)``.

Evaluators are plain callables. Density evaluators take ``(t, |x|)`` in
physical space; mass evaluators take ``(t, rho)``. :func:`radial_evaluator`
turns a function of the volume coordinate into a physical one. All sups are
taken over the grids passed in.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import SelfSimilarParams, check_alpha, profile_F, self_similar_mass, volume_coord

__all__ = [
    "RescaledProfile",
    "BoundReport",
    "ResidualNorms",
    "radial_evaluator",
    "rescale_profile",
    "relative_error_profile",
    "tail_relative_error",
    "mass_rel_error",
    "check_global_bound",
    "residual_mass_eq",
    "comparison_test",
    "self_similar_u_rho",
]

F_FLOOR = 1e-300


def radial_evaluator(f_rho, dim: int):
    """Wrap ``f_rho(t, rho)`` as ``f(t, |x|)`` with ``rho = w_d |x|^d``."""

    def f(t, x_abs):
        return f_rho(t, volume_coord(x_abs, dim))

    return f


def self_similar_u_rho(M: float, alpha: float, t, rho):
    """``U_M`` written in the volume coordinate; independent of the dimension."""
    a = check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    s = rho * t ** (-1.0 / a) / (a * M)
    return t ** (-1.0 / a) * (a + s ** (a / (1 - a))) ** (-1.0 / a)


@dataclass(frozen=True)
class RescaledProfile:
    t: float
    y: np.ndarray
    w: np.ndarray

    def is_nonincreasing(self, atol: float = 1e-12) -> bool:
        order = np.argsort(self.y)
        return bool(np.all(np.diff(self.w[order]) <= atol))


def rescale_profile(u, alpha: float, dim: int, t: float, y_grid) -> RescaledProfile:
    """Samples of ``w(t, y) = t^{1/a} u(t, t^{1/(d a)} y)`` on ``y_grid``."""
    a = check_alpha(alpha)
    if not t > 0:
        raise ValueError("rescaling needs t > 0")
    y = np.abs(np.asarray(y_grid, dtype=float))
    x = t ** (1.0 / (dim * a)) * y
    w = t ** (1.0 / a) * np.asarray(u(t, x), dtype=float)
    return RescaledProfile(float(t), y, w)


def relative_error_profile(u, M: float, alpha: float, dim: int, t: float, y_grid, y_min: float = 0.0) -> float:
    """``sup |w - F_M| / F_M`` over grid points with ``|y| >= y_min``.

    ``F_M`` is floored at 1e-300 so that far-tail samples cannot divide by
    an underflowed zero.
    """
    y = np.abs(np.asarray(y_grid, dtype=float))
    y = y[y >= y_min]
    if y.size == 0:
        return 0.0
    prof = rescale_profile(u, alpha, dim, t, y)
    F = np.maximum(profile_F(SelfSimilarParams(alpha, M, dim), y), F_FLOOR)
    return float(np.max(np.abs(prof.w - F) / F))


def tail_relative_error(u_rho, M: float, alpha: float, t: float, rho_grid) -> np.ndarray:
    """Pointwise ``|u - U_M| / U_M`` at fixed ``t`` along ``rho_grid``.

    ``u_rho(t, rho)`` is a density in the volume coordinate.
    """
    rho = np.asarray(rho_grid, dtype=float)
    U = np.maximum(self_similar_u_rho(M, alpha, t, rho), F_FLOOR)
    return np.abs(np.asarray(u_rho(t, rho), dtype=float) - U) / U


def mass_rel_error(m, M: float, alpha: float, t: float, kappa_grid, kappa0: float) -> float:
    """``sup_{kappa >= kappa0} |m(t, t^{1/a} kappa) - G_M(kappa)| / G_M(kappa)``."""
    a = check_alpha(alpha)
    if not t > 0:
        raise ValueError("t must be positive")
    if not kappa0 > 0:
        raise ValueError("kappa0 must be positive")
    k = np.asarray(kappa_grid, dtype=float)
    k = k[k >= kappa0]
    if k.size == 0:
        return 0.0
    G = np.maximum(self_similar_mass(SelfSimilarParams(a, M), k), F_FLOOR)
    vals = np.asarray(m(t, t ** (1.0 / a) * k), dtype=float)
    return float(np.max(np.abs(vals - G) / G))


@dataclass(frozen=True)
class BoundReport:
    ok: bool
    worst_ratio: float
    worst_at: tuple

    def __bool__(self) -> bool:
        return self.ok


def check_global_bound(m, alpha: float, t_grid, rho_grid, atol: float = 1e-10) -> BoundReport:
    """Check ``m(t, rho) <= (a t)^{-1/a} rho`` on a grid.

    ``m`` is a callable ``(t, rho_array)`` or an array of shape
    ``(len(t_grid), len(rho_grid))``. ``worst_ratio`` is the largest
    ``m / bound`` over points with ``rho > 0``.
    """
    a = check_alpha(alpha)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    rho = np.asarray(rho_grid, dtype=float)
    if np.any(t <= 0):
        raise ValueError("the bound needs t > 0")
    if callable(m):
        vals = np.array([np.asarray(m(tt, rho), dtype=float) for tt in t])
    else:
        vals = np.asarray(m, dtype=float).reshape(t.size, rho.size)
    bound = (a * t[:, None]) ** (-1.0 / a) * rho[None, :]
    ok = bool(np.all(vals <= bound + atol))
    pos = rho > 0
    if not pos.any():
        return BoundReport(ok, 0.0, (float("nan"), float("nan")))
    ratio = vals[:, pos] / bound[:, pos]
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return BoundReport(ok, float(ratio[i, j]), (float(t[i]), float(rho[pos][j])))


@dataclass(frozen=True)
class ResidualNorms:
    sup: float
    l1: float
    values: np.ndarray


def residual_mass_eq(m_samples, t_grid, rho_grid, alpha: float, mask=None) -> ResidualNorms:
    """Centred-difference residual of ``m_t + m ((m_rho)_+)^a`` at interior points.

    ``m_samples[n, j] = m(t_n, rho_j)`` on uniform grids. ``mask`` (shape of
    the interior) selects points to include, e.g. to stay away from fan
    junctions. The L1 norm is ``sum |R| h_t h_rho``.
    """
    a = check_alpha(alpha)
    m = np.asarray(m_samples, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    rho = np.asarray(rho_grid, dtype=float)
    if m.ndim != 2 or m.shape[0] < 3 or m.shape[1] < 3:
        raise ValueError("grid too small: need at least 3x3 samples")
    if m.shape != (t.size, rho.size):
        raise ValueError("samples do not match the grids")
    ht = np.diff(t)
    hr = np.diff(rho)
    if not (np.allclose(ht, ht[0], rtol=1e-9) and np.allclose(hr, hr[0], rtol=1e-9)):
        raise ValueError("grids must be uniform")
    ht, hr = ht[0], hr[0]
    m_t = (m[2:, 1:-1] - m[:-2, 1:-1]) / (2 * ht)
    m_r = (m[1:-1, 2:] - m[1:-1, :-2]) / (2 * hr)
    R = m_t + m[1:-1, 1:-1] * np.maximum(m_r, 0.0) ** a
    if mask is not None:
        R = np.where(mask, R, 0.0)
    absR = np.abs(R)
    return ResidualNorms(float(np.max(absR)), float(np.sum(absR) * ht * hr), R)


def comparison_test(evaluator1, evaluator2, samples, atol: float = 1e-10) -> bool:
    """True iff ``evaluator1 >= evaluator2 - atol`` at every sample.

    ``samples`` is an iterable of ``(t, x)`` pairs where ``x`` may be an array.
    """
    for t, x in samples:
        a = np.asarray(evaluator1(t, x), dtype=float)
        b = np.asarray(evaluator2(t, x), dtype=float)
        if np.any(a < b - atol):
            return False
    return True
