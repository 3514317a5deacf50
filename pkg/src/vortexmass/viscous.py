r"""
Degenerate-viscosity regularisation of the mass equation
========================================================

For ``eps > 0`` the radial mass solves

.. math::

    m_t = -\big((m_\rho)_+ + \varepsilon\big)^a m
          + \varepsilon \big(d\, \omega_d^{1/d} \rho^{(d-1)/d}\big)^2 m_{\rho\rho},

with ``m(t, 0) = 0`` and ``m(t, rho_max) = M`` pinned. As ``eps -> 0`` the
solutions approach the viscosity solution computed by :mod:`vortexmass.hjfd`.

The explicit update uses the left difference inside the power and a centred
second difference for the diffusion. Besides the two stability bounds kept
in :class:`ViscousConfig`, the step must make every coefficient of the update
non-negative, which is what gives the discrete maximum and comparison
principles. :func:`stable_h_t` returns a step satisfying all three.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characteristics import RadialInitialData
from .exact import check_alpha, unit_ball_volume
from .hjfd import FDSolution, run_fd

__all__ = [
    "StabilityError",
    "ViscousConfig",
    "ViscousSolution",
    "DistanceTable",
    "diffusion_coefficient",
    "stable_h_t",
    "default_h_rho",
    "boundary_layer_width",
    "viscous_step",
    "run_viscous",
    "vanishing_viscosity_study",
]


class StabilityError(ValueError):
    """Time step too large for the explicit viscous update."""


def diffusion_coefficient(rho, epsilon: float, dim: int):
    """``eps (d w_d^{1/d} rho^{(d-1)/d})^2``; equals ``4 eps`` in one dimension."""
    rho = np.asarray(rho, dtype=float)
    w = unit_ball_volume(dim)
    return epsilon * (dim * w ** (1.0 / dim)) ** 2 * rho ** (2.0 * (dim - 1) / dim)


@dataclass(frozen=True)
class ViscousConfig:
    """Grid and parameters of one viscous run.

    ``u0_sup`` and ``M`` (the pinned right value, also the mass bound) are
    taken from the data by :func:`run_viscous` when not given.
    """

    epsilon: float
    alpha: float
    dim: int
    h_rho: float
    h_t: float
    rho_max: float
    T: float
    u0_sup: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        for name in ("epsilon", "h_rho", "h_t", "rho_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.T >= 0:
            raise ValueError("T must be non-negative")
        if self.u0_sup < 0 or self.M < 0:
            raise ValueError("u0_sup and M must be non-negative")

    @property
    def n_rho(self) -> int:
        return int(math.ceil(self.rho_max / self.h_rho - 1e-9))

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.T / self.h_t - 1e-9))

    @property
    def c_max(self) -> float:
        """Largest ``(d w_d^{1/d} rho^{(d-1)/d})^2`` on the grid."""
        return float(diffusion_coefficient(self.n_rho * self.h_rho, 1.0, self.dim))

    def stability_report(self) -> dict:
        """Ratios of ``h_t`` to each bound; all must be <= 1 (the transport one < 1)."""
        eps, al = self.epsilon, self.alpha
        parabolic = self.h_t * 2 * eps * self.c_max / self.h_rho**2
        transport = self.h_t * (self.u0_sup + eps) ** al / (0.9 * self.h_rho)
        monotone = self.h_t * (
            al * self.M * eps ** (al - 1) / self.h_rho
            + 2 * eps * self.c_max / self.h_rho**2
            + (self.u0_sup + eps) ** al
        )
        return {"parabolic": parabolic, "transport": transport, "monotone": monotone}

    def check(self) -> None:
        rep = self.stability_report()
        bad = [k for k, v in rep.items() if (v >= 1 if k == "transport" else v > 1)]
        if bad:
            detail = ", ".join(f"{k}={rep[k]:.4g}" for k in bad)
            raise StabilityError(f"explicit viscous step unstable ({detail})")


def stable_h_t(epsilon, alpha, dim, h_rho, rho_max, u0_sup, M, safety: float = 0.9) -> float:
    """Largest step meeting all stability bounds, times ``safety``."""
    alpha = check_alpha(alpha)
    c_max = float(diffusion_coefficient(math.ceil(rho_max / h_rho - 1e-9) * h_rho, 1.0, dim))
    rate = (
        alpha * M * epsilon ** (alpha - 1) / h_rho
        + 2 * epsilon * c_max / h_rho**2
        + (u0_sup + epsilon) ** alpha
    )
    transport = 0.9 * h_rho / (u0_sup + epsilon) ** alpha
    return safety * min(1.0 / rate, transport)


def _coeffs(config: ViscousConfig, rho):
    return config.h_t * diffusion_coefficient(rho, config.epsilon, config.dim) / config.h_rho**2


def viscous_step(row, config: ViscousConfig, *, _diff=None) -> np.ndarray:
    """One explicit step; the end values are pinned to ``0`` and ``config.M``."""
    config.check()
    M = np.asarray(row, dtype=float)
    rho = config.h_rho * np.arange(M.size)
    diff = _coeffs(config, rho[1:-1]) if _diff is None else _diff
    out = np.empty_like(M)
    s = np.maximum((M[1:-1] - M[:-2]) / config.h_rho, 0.0)
    out[1:-1] = (
        M[1:-1]
        - config.h_t * (s + config.epsilon) ** config.alpha * M[1:-1]
        + diff * (M[2:] - 2 * M[1:-1] + M[:-2])
    )
    out[0] = 0.0
    out[-1] = config.M
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite value in viscous step")
    return out


@dataclass
class ViscousSolution(FDSolution):
    """Same layout as :class:`~vortexmass.hjfd.FDSolution`; ``config`` is a ViscousConfig."""


def _data_bounds(m0, rho):
    if isinstance(m0, RadialInitialData):
        return m0.sup, m0.mass, np.asarray(m0.m0(rho), dtype=float)
    row = np.asarray(m0(rho) if callable(m0) else m0, dtype=float)
    if row.shape != rho.shape:
        raise ValueError(f"sampled mass has shape {row.shape}, grid needs {rho.shape}")
    u = np.diff(row) / (rho[1] - rho[0])
    return float(np.max(u, initial=0.0)), float(row[-1]), row


def run_viscous(
    m0,
    epsilon: float,
    alpha: float,
    T: float,
    *,
    rho_max: float,
    h_rho: float,
    h_t: float | None = None,
    dim: int = 1,
    save_every: int | None = None,
    save_times=None,
) -> ViscousSolution:
    """Evolve the viscous mass equation to time ``T``.

    ``m0`` is a :class:`RadialInitialData`, a callable or an array sampled on
    ``h_rho * arange(J+1)``. The right end is pinned to ``m0(rho_max)``.
    Without ``h_t`` the step from :func:`stable_h_t` is used.
    """
    alpha = check_alpha(alpha)
    J = int(math.ceil(rho_max / h_rho - 1e-9))
    rho = h_rho * np.arange(J + 1)
    u_sup, _, row = _data_bounds(m0, rho)
    if not np.all(np.isfinite(row)) or np.any(row < 0):
        raise ValueError("initial mass must be finite and non-negative")
    if np.any(np.diff(row) < -1e-14 * max(1.0, float(np.max(np.abs(row))))):
        raise ValueError("initial mass must be non-decreasing")
    if row[0] != 0.0:
        raise ValueError("initial mass must vanish at rho=0")
    M_right = float(row[-1])
    if h_t is None:
        h_t = stable_h_t(epsilon, alpha, dim, h_rho, rho_max, u_sup, M_right)
    config = ViscousConfig(epsilon, alpha, dim, h_rho, h_t, rho_max, T, u0_sup=u_sup, M=M_right)
    config.check()

    N = config.n_steps
    if save_every is None:
        save_every = max(1, N // 200)
    keep = set(range(0, N + 1, save_every)) | {N}
    if save_times is not None:
        keep |= {min(N, int(round(t / h_t))) for t in np.atleast_1d(save_times)}

    M = row.copy()
    steps, rows = [0], [M.copy()]
    diff = _coeffs(config, rho[1:-1])
    inner = M[1:-1]
    s = np.empty(J - 1)
    lap = np.empty(J - 1)
    eps, inv_h = epsilon, 1.0 / h_rho
    for n in range(1, N + 1):
        # transport: -h_t ((s)_+ + eps)^a m
        np.subtract(M[1:-1], M[:-2], out=s)
        s *= inv_h
        np.maximum(s, 0.0, out=s)
        s += eps
        np.power(s, alpha, out=s)
        s *= h_t
        # diffusion: centred second difference, computed before the in-place update
        np.subtract(M[2:], M[1:-1], out=lap)
        lap -= M[1:-1]
        lap += M[:-2]
        lap *= diff
        s *= inner
        inner -= s
        inner += lap
        if n in keep:
            if not np.all(np.isfinite(M)):
                raise FloatingPointError(f"non-finite value at step {n}")
            steps.append(n)
            rows.append(M.copy())
    meta = {
        "epsilon": epsilon,
        "h_t": h_t,
        "h_rho": h_rho,
        "n_steps": N,
        "n_rho": J,
        **{f"stability_{k}": v for k, v in config.stability_report().items()},
    }
    return ViscousSolution(config, rho, np.array(steps), np.array(rows), meta)


@dataclass
class DistanceTable:
    epsilons: np.ndarray
    distances: np.ndarray
    window: tuple
    slack: float = 0.1
    spurious: np.ndarray | None = field(default=None)

    @property
    def monotone(self) -> bool:
        """Non-increasing along the sequence up to the relative slack."""
        d = self.distances
        return bool(np.all(d[1:] <= d[:-1] * (1 + self.slack)))

    def rows(self):
        return list(zip(self.epsilons.tolist(), self.distances.tolist()))


def boundary_layer_width(config: ViscousConfig) -> float:
    """Width of the layer next to ``rho_max`` disturbed by the pinned value.

    The fan tail still lacks mass at any finite ``rho_max``, so pinning
    ``m = M`` there creates a steep layer of diffusive width. Interior
    properties (gradient bound, comparison with the fan) hold left of
    ``rho_max`` minus this width: three diffusion lengths plus five cells.
    """
    D = float(diffusion_coefficient(config.rho_max, config.epsilon, config.dim))
    return 3.0 * math.sqrt(D * max(config.T, 0.0)) + 5 * config.h_rho


def default_h_rho(epsilon: float) -> float:
    """Grid spacing resolving the viscous layer of width about ``eps``."""
    return min(1e-2, max(epsilon / 2, 2.5e-4))


def vanishing_viscosity_study(
    m0,
    epsilons,
    T: float,
    alpha: float,
    *,
    reference=None,
    window: tuple = (0.0, 2.0),
    rho_max: float | None = None,
    dim: int = 1,
    h_rho=None,
    spurious=None,
    jobs: int = 1,
) -> DistanceTable:
    """Sup distance on ``window`` between viscous runs and a reference at ``T``.

    ``reference`` is an :class:`FDSolution` or a callable ``(t, rho) -> m``;
    by default an FD run with ``delta = 1e-3`` on ``h_rho = 2e-3`` is used.
    ``spurious`` (a callable ``(t, rho) -> m``) adds a second distance column.
    """
    epsilons = np.asarray(epsilons, dtype=float)
    if epsilons.size == 0 or np.any(epsilons <= 0) or np.any(np.diff(epsilons) >= 0):
        raise ValueError("epsilons must be positive and decreasing")
    lo, hi = window
    if rho_max is None:
        rho_max = 2 * hi + 1
    if reference is None:
        reference = _fd_reference(m0, T, alpha, rho_max)
    if isinstance(reference, FDSolution):
        ref_sol = reference
        reference = lambda t, r: np.interp(r, ref_sol.rho, ref_sol.at(t))  # noqa: E731
    if not callable(reference):
        raise ValueError("reference unavailable")

    tasks = []
    for k, eps in enumerate(epsilons):
        h = default_h_rho(eps) if h_rho is None else (h_rho[k] if np.ndim(h_rho) else h_rho)
        tasks.append((m0, float(eps), alpha, T, rho_max, float(h), dim))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            sols = list(pool.map(_viscous_task, tasks))
    else:
        sols = [_viscous_task(t) for t in tasks]

    dist, spur = [], []
    for sol in sols:
        mask = (sol.rho >= lo) & (sol.rho <= hi)
        r = sol.rho[mask]
        m = sol.final[mask]
        ref = np.asarray(reference(sol.final_time, r), dtype=float)
        if not np.all(np.isfinite(ref)):
            raise ValueError("reference unavailable on the window")
        dist.append(float(np.max(np.abs(m - ref))))
        if spurious is not None:
            spur.append(float(np.max(np.abs(m - spurious(sol.final_time, r)))))
    return DistanceTable(
        epsilons, np.array(dist), (lo, hi), spurious=np.array(spur) if spurious is not None else None
    )


def _viscous_task(args):
    m0, eps, alpha, T, rho_max, h, dim = args
    return run_viscous(m0, eps, alpha, T, rho_max=rho_max, h_rho=h, dim=dim, save_every=10**12)


def _fd_reference(m0, T, alpha, rho_max):
    delta, h = 1e-3, 2e-3
    if isinstance(m0, RadialInitialData):
        M_bar = m0.mass
    else:
        M_bar = float(np.max(m0(np.linspace(0, rho_max, 4097)))) if callable(m0) else float(np.max(m0))
    M_bar = M_bar if M_bar > 0 else 1.0
    h_t = 0.9 * h * delta ** (1 - alpha) / (alpha * M_bar)
    return run_fd(m0, T, delta, alpha, rho_max=rho_max, h_rho=h, h_t=h_t, M_bar=M_bar, save_every=10**12)
