r"""
Solutions by characteristics for radial non-increasing data
============================================================

The mass ``m(t, rho)`` of a radial solution solves ``m_t + m (m_rho)^a = 0``
in the volume coordinate. Characteristics are straight lines

.. math::

    \rho(t) = \rho_0 + a\, m_0(\rho_0)\, \eta_0^{a-1} t,

and along them ``u = (eta0^{-a} + a t)^{-1/a}`` and
``m = m0(rho0) (1 + a eta0^a t)^{1 - 1/a}``. At a jump of ``u0`` the
characteristics fan out with ``eta0`` covering the jump interval.

Initial data are piecewise constant in ``rho`` (:class:`RadialInitialData`),
so ``m0`` is piecewise linear and every formula here is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import check_alpha

__all__ = [
    "GapPointError",
    "RadialInitialData",
    "CharacteristicFoot",
    "square_data",
    "gap_data",
    "triangle_data",
    "sample_steps",
    "characteristic_position",
    "invert_P",
    "eval_u",
    "eval_m",
    "square_rarefaction_u",
    "square_rarefaction_m",
    "shift_gap",
]


class GapPointError(ValueError):
    """The point lies inside a preserved gap, where ``u = 0``."""


@dataclass(frozen=True)
class RadialInitialData:
    """Non-increasing piecewise-constant density in the volume coordinate.

    ``values[i]`` is the density on ``[edges[i], edges[i+1])``; the density is
    zero beyond ``edges[-1]``. ``edges[0]`` must be 0. A leading gap
    ``gap > 0`` translates the whole datum to the right, leaving ``u0 = 0``
    on ``[0, gap)``.
    """

    edges: np.ndarray
    values: np.ndarray
    gap: float = 0.0

    def __post_init__(self):
        edges = np.array(self.edges, dtype=float)
        values = np.array(self.values, dtype=float)
        if edges.ndim != 1 or values.ndim != 1 or len(edges) != len(values) + 1:
            raise ValueError("need len(edges) == len(values) + 1")
        if len(values) == 0:
            raise ValueError("at least one cell is required")
        if edges[0] != 0.0:
            raise ValueError("edges must start at 0 (use gap= for a leading gap)")
        if np.any(np.diff(edges) <= 0) or not np.all(np.isfinite(edges)):
            raise ValueError("edges must be finite and strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("values must be finite and non-negative")
        if np.any(np.diff(values) > 0):
            raise ValueError("values must be non-increasing")
        if not self.gap >= 0:
            raise ValueError("gap must be non-negative")
        # trailing zero cells carry no mass and no characteristics
        npos = int(np.count_nonzero(values > 0))
        if npos and npos < len(values):
            values, edges = values[:npos], edges[: npos + 1]
        edges.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gap", float(self.gap))
        cum = np.concatenate([[0.0], np.cumsum(values * np.diff(edges))])
        cum.setflags(write=False)
        object.__setattr__(self, "_cum", cum)

    @property
    def mass(self) -> float:
        return float(self._cum[-1])

    @property
    def sup(self) -> float:
        return float(self.values[0])

    @property
    def support_end(self) -> float:
        return float(self.edges[-1] + self.gap)

    def u0(self, rho):
        """Right-continuous initial density."""
        r = np.asarray(rho, dtype=float) - self.gap
        idx = np.searchsorted(self.edges, r, side="right") - 1
        inside = (r >= 0) & (idx < len(self.values))
        out = np.where(inside, self.values[np.clip(idx, 0, len(self.values) - 1)], 0.0)
        return out[()] if out.ndim == 0 else out

    def m0(self, rho):
        """Initial mass, piecewise linear and non-decreasing."""
        r = np.asarray(rho, dtype=float) - self.gap
        out = np.interp(r, self.edges, self._cum, left=0.0, right=self.mass)
        return out[()] if np.ndim(out) == 0 else out

    def limits(self, rho0: float) -> tuple[float, float]:
        """``(u0(rho0+), u0(rho0-))``, the jump interval at ``rho0``."""
        r = rho0 - self.gap
        if r < 0:
            return 0.0, 0.0
        right = float(self.u0(rho0))
        if r == 0:
            return right, (right if self.gap == 0 else 0.0)
        idx = np.searchsorted(self.edges, r, side="left") - 1
        left = float(self.values[idx]) if idx < len(self.values) else 0.0
        return right, left


@dataclass(frozen=True)
class CharacteristicFoot:
    """Foot ``(rho0, eta0)`` of the characteristic through a point."""

    rho0: float
    eta0: float

    def is_valid(self, data: RadialInitialData, atol: float = 0.0) -> bool:
        lo, hi = data.limits(self.rho0)
        return lo - atol <= self.eta0 <= hi + atol


def square_data(c0: float = 1.0, L: float = 1.0) -> RadialInitialData:
    """``u0 = c0`` on ``[0, L]``."""
    return RadialInitialData([0.0, L], [c0])


def gap_data(c0: float = 1.0, L: float = 1.0, b: float = 0.5) -> RadialInitialData:
    """Square datum of height ``c0`` on ``[b, b + L]``."""
    return RadialInitialData([0.0, L], [c0], gap=b)


def sample_steps(f, rho_end: float, n: int) -> RadialInitialData:
    """Step approximation of a non-increasing density on ``[0, rho_end]``.

    Each of the ``n`` cells takes the value at its midpoint.
    """
    edges = np.linspace(0.0, rho_end, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return RadialInitialData(edges, np.asarray(f(mid), dtype=float))


def triangle_data(n: int = 200) -> RadialInitialData:
    """Step sampling of ``u0 = (1 - rho)_+``."""
    return sample_steps(lambda r: np.maximum(1.0 - r, 0.0), 1.0, n)


def characteristic_position(foot: CharacteristicFoot, data: RadialInitialData, alpha: float, t):
    """Position at time ``t`` of the characteristic leaving ``foot``."""
    alpha = check_alpha(alpha)
    m = float(data.m0(foot.rho0))
    if foot.eta0 == 0.0 or m == 0.0:
        return foot.rho0 + 0.0 * np.asarray(t, dtype=float)
    return foot.rho0 + alpha * m * foot.eta0 ** (alpha - 1) * np.asarray(t, dtype=float)


# -- inversion of P_t ---------------------------------------------------------
#
# For fixed t the domain of P_t, ordered by rho0 and then by decreasing eta0,
# is a chain of alternating pieces: the interior of cell i (eta0 = u_i, P
# affine in rho0) and the fan at edge i+1 (rho0 fixed, eta0 from u_i down to
# u_{i+1}, or to 0 at the last edge). P_t is continuous and strictly
# increasing along the chain, so the images of the piece ends are sorted and
# a binary search finds the piece; inside a piece P_t inverts in closed form.


def _piece_table(data: RadialInitialData, alpha: float, t: float):
    e, v, cum = data.edges, data.values, data._cum
    # rho at the start of cell i (leaving edge i with eta = v[i]) and at its end
    start = e[:-1] + alpha * cum[:-1] * v ** (alpha - 1) * t
    end = e[1:] + alpha * cum[1:] * v ** (alpha - 1) * t
    return start, end


def _invert(t: float, r: np.ndarray, data: RadialInitialData, alpha: float):
    """Vectorised inversion; returns ``(rho0, piece_kind, cell, X)``.

    ``X = (r - e)/(alpha m t)`` on fans, so that ``eta0^{-alpha} = X^{alpha/(1-alpha)}``
    without forming ``eta0`` (which underflows far out in the tail).
    """
    e, v, cum = data.edges, data.values, data._cum
    K = len(v)
    start, end = _piece_table(data, alpha, t)
    # piece ordering: cell 0, fan 1, cell 1, fan 2, ..., cell K-1, fan K
    # cell k spans [start[k], end[k]], fan k+1 spans [end[k], start[k+1]] (start[K] = inf)
    k = np.searchsorted(end, r, side="left")  # first cell whose end >= r
    k = np.minimum(k, K)
    in_cell = np.zeros(r.shape, dtype=bool)
    kk = np.minimum(k, K - 1)
    in_cell = (k < K) & (r >= start[kk])
    rho0 = np.empty_like(r)
    X = np.full_like(r, np.nan)
    # cells: r = rho0 + a t v^{a-1} (cum_k + v (rho0 - e_k))
    vk = v[kk]
    c = alpha * t * vk ** (alpha - 1)
    rho0_cell = (r - c * (cum[kk] - vk * e[kk])) / (1 + c * vk)
    rho0_cell = np.clip(rho0_cell, e[kk], e[kk + 1])
    rho0 = np.where(in_cell, rho0_cell, e[np.minimum(k, K)])
    # fans: at edge k (fan k sits between cell k-1 and cell k)
    fan_edge = np.minimum(k, K)
    mf = cum[fan_edge]
    with np.errstate(divide="ignore", invalid="ignore"):
        X = np.where(in_cell, np.nan, (r - e[fan_edge]) / (alpha * mf * t))
    return rho0, in_cell, kk, fan_edge, X


def invert_P(t: float, rho: float, data: RadialInitialData, alpha: float) -> CharacteristicFoot:
    """Foot of the characteristic reaching ``rho`` at time ``t > 0``."""
    alpha = check_alpha(alpha)
    if not t > 0:
        raise ValueError("invert_P needs t > 0")
    if data.mass <= 0:
        raise ValueError("invert_P needs data with positive mass")
    if rho < data.gap:
        raise GapPointError(f"rho={rho!r} lies in the preserved gap [0, {data.gap!r}); u=0 there")
    r = np.array([rho - data.gap], dtype=float)
    if r[0] == 0.0:
        return CharacteristicFoot(data.gap, float(data.values[0]))
    rho0, in_cell, kk, fan_edge, X = _invert(t, r, data, alpha)
    if in_cell[0]:
        return CharacteristicFoot(float(rho0[0]) + data.gap, float(data.values[kk[0]]))
    eta = X[0] ** (1.0 / (alpha - 1))
    return CharacteristicFoot(float(rho0[0]) + data.gap, float(eta))


def _evaluate(t, rho, data: RadialInitialData, alpha: float, want: str):
    alpha = check_alpha(alpha)
    t = float(t)
    if t < 0:
        raise ValueError("t must be non-negative")
    rho_arr = np.asarray(rho, dtype=float)
    if t == 0.0:
        return data.u0(rho_arr) if want == "u" else data.m0(rho_arr)
    r = np.atleast_1d(rho_arr - data.gap)
    out = np.zeros(r.shape)
    live = r >= 0
    if data.mass > 0 and live.any():
        rl = r[live]
        rho0, in_cell, kk, fan_edge, X = _invert(t, rl, data, alpha)
        q = alpha / (1 - alpha)
        v = data.values
        with np.errstate(divide="ignore", over="ignore"):
            # eta0^{-alpha}: v^{-alpha} in cells, X^{q} on fans
            eta_neg_a = np.where(in_cell, v[kk] ** (-alpha), X**q)
        if want == "u":
            res = (eta_neg_a + alpha * t) ** (-1 / alpha)
        else:
            m0 = data.m0(rho0 + data.gap)
            # m0 (1 + a eta^a t)^{1-1/a} = m0 (eta^{-a} / (eta^{-a} + a t))^{1/a - 1}
            with np.errstate(invalid="ignore"):
                ratio = np.where(np.isinf(eta_neg_a), 1.0, eta_neg_a / (eta_neg_a + alpha * t))
            res = m0 * ratio ** (1 / alpha - 1)
        out[live] = res
    return out.reshape(rho_arr.shape)[()] if rho_arr.ndim == 0 else out.reshape(rho_arr.shape)


def eval_u(t, rho, data: RadialInitialData, alpha: float):
    """Density ``u(t, rho)`` of the rarefaction-fan solution."""
    return _evaluate(t, rho, data, alpha, "u")


def eval_m(t, rho, data: RadialInitialData, alpha: float):
    """Mass ``m(t, rho)`` of the rarefaction-fan solution."""
    return _evaluate(t, rho, data, alpha, "m")


def square_rarefaction_u(c0: float, L: float, alpha: float, t, rho):
    """Closed-form fan solution for ``u0 = c0 1_[0,L]``."""
    alpha = check_alpha(alpha)
    t = float(t)
    rho = np.asarray(rho, dtype=float)
    flat = (c0 ** (-alpha) + alpha * t) ** (-1 / alpha)
    if t == 0.0:
        out = np.where(rho <= L, c0, 0.0)
        return out[()] if out.ndim == 0 else out
    junction = L * (1 + alpha * c0**alpha * t)
    with np.errstate(invalid="ignore"):
        X = np.maximum(rho - L, 0.0) / (alpha * c0 * L * t)
        fan = (X ** (alpha / (1 - alpha)) + alpha * t) ** (-1 / alpha)
    out = np.where(rho <= junction, flat, fan)
    return out[()] if out.ndim == 0 else out


def square_rarefaction_m(c0: float, L: float, alpha: float, t, rho):
    """Mass of :func:`square_rarefaction_u`."""
    alpha = check_alpha(alpha)
    t = float(t)
    rho = np.asarray(rho, dtype=float)
    flat = (c0 ** (-alpha) + alpha * t) ** (-1 / alpha)
    if t == 0.0:
        out = c0 * np.clip(rho, 0.0, L)
        return out[()] if out.ndim == 0 else out
    junction = L * (1 + alpha * c0**alpha * t)
    with np.errstate(invalid="ignore", divide="ignore"):
        Xq = (np.maximum(rho - L, 0.0) / (alpha * c0 * L * t)) ** (alpha / (1 - alpha))
        fan = c0 * L * (Xq / (Xq + alpha * t)) ** (1 / alpha - 1)
    out = np.where(rho <= junction, flat * rho, fan)
    return out[()] if out.ndim == 0 else out


def shift_gap(data: RadialInitialData, b: float) -> RadialInitialData:
    """The same datum translated right by ``b``, leaving a gap ``[0, b)``."""
    if not b > 0:
        raise ValueError("gap width must be positive")
    if data.gap != 0:
        raise ValueError("data already has a leading gap")
    return RadialInitialData(data.edges, data.values, gap=b)
