from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexmass.characteristics import RadialInitialData, eval_m, square_data
from vortexmass.hjfd import (
    CFLError,
    FDConfig,
    cfl_margin,
    cfl_ok,
    convergence_study,
    derive_u,
    discrete_giant,
    fd_step,
    h_delta,
    run_fd,
)


def test_h_delta():
    assert h_delta(0.0, 0.01, 0.5) == 0.0
    assert h_delta(-3.0, 0.01, 0.5) == 0.0
    assert h_delta(0.99, 0.01, 0.5) == pytest.approx(1.0 - 0.1)
    s = np.linspace(0, 5, 50)
    assert np.all(h_delta(s, 0.01, 0.3) < s**0.3 + 1e-15)


def test_coupled_grid_satisfies_cfl():
    for al in (0.3, 0.5, 0.7):
        for d in (0.1, 0.01):
            cfg = FDConfig.coupled(d, al, 2.0, 1.0, 3.0)
            assert cfg.h_rho == pytest.approx(d ** (1 + 2 * al))
            assert cfl_ok(cfg) and cfl_margin(cfg) < 1


def test_cfl_violation_rejected():
    cfg = FDConfig(0.1, 0.5, h_rho=0.01, h_t=1.0, rho_max=1.0, T=1.0, M_bar=1.0)
    assert not cfl_ok(cfg)
    with pytest.raises(CFLError):
        fd_step(np.linspace(0, 1, 101), cfg)
    with pytest.raises(CFLError):
        run_fd(square_data(), 1.0, 0.1, 0.5, h_rho=0.01, h_t=1.0)


def test_single_step_formula():
    cfg = FDConfig.coupled(0.1, 0.5, 1.0, 1.0, 1.0)
    row = np.minimum(np.arange(cfg.n_rho + 1) * cfg.h_rho, 0.5)
    new = fd_step(row, cfg)
    s = np.diff(row) / cfg.h_rho
    np.testing.assert_allclose(new[1:], row[1:] / (1 + cfg.h_t * h_delta(s, 0.1, 0.5)))
    assert new[0] == 0.0


def test_zero_data_stays_zero():
    sol = run_fd(lambda r: 0.0 * r, 1.0, 0.1, 0.5, rho_max=2.0)
    assert np.all(sol.values == 0.0)


def test_initial_data_validation():
    with pytest.raises(ValueError, match="non-decreasing"):
        run_fd(lambda r: np.where(r < 0.5, r, 0.1), 1.0, 0.1, 0.5, rho_max=1.0)
    with pytest.raises(ValueError, match="vanish"):
        run_fd(lambda r: 1.0 + r, 1.0, 0.1, 0.5, rho_max=1.0)


def test_flat_zone_follows_discrete_giant():
    sol = run_fd(square_data(1.0, 1.0), 1.0, 0.05, 0.5)
    u = derive_u(sol)
    g = discrete_giant(1.0, sol)
    assert np.all(u <= g[:, None] + 1e-10)
    # near the origin the density is exactly the discrete giant
    np.testing.assert_allclose(u[:, 5], g, rtol=1e-9)


def ordered_pair(rng):
    k = int(rng.integers(1, 6))
    edges = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 0.8, k))])
    v2 = np.sort(rng.uniform(0.0, 2.0, k))[::-1]
    v1 = np.maximum(np.sort(rng.uniform(0.0, 2.0, k))[::-1], v2)
    return RadialInitialData(edges, v1), RadialInitialData(edges, v2)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_monotone_scheme_properties(seed):
    rng = np.random.default_rng(seed)
    d1, d2 = ordered_pair(rng)
    M = max(d1.mass, 1e-3)
    kw = dict(rho_max=5.0, M_bar=M, save_every=20)
    s1 = run_fd(d1, 1.0, 0.1, 0.5, **kw)
    s2 = run_fd(d2, 1.0, 0.1, 0.5, **kw)
    assert np.all(s1.values >= s2.values - 1e-10)
    assert np.all(np.diff(s1.values, axis=1) >= -1e-12)
    assert np.all(s1.values <= d1.mass + 1e-12) and np.all(s1.values >= 0)


def test_grid_truncation_does_not_change_interior():
    d = square_data()
    a = run_fd(d, 0.5, 0.1, 0.5, rho_max=2.0)
    b = run_fd(d, 0.5, 0.1, 0.5, rho_max=4.0)
    n = a.rho.size
    np.testing.assert_array_equal(a.final, b.final[:n])


def test_convergence_study_small():
    d = square_data()
    oracle = lambda t, r: eval_m(t, r, d, 0.5)  # noqa: E731
    table = convergence_study(d, [0.2, 0.1, 0.05], oracle, T=1.0, alpha=0.5)
    assert np.all(np.diff(table.errors) < 0)
    assert 0.2 < table.slope < 0.8
    assert len(table.rows()) == 3
    with pytest.raises(ValueError):
        convergence_study(d, [0.05, 0.1], oracle, T=1.0, alpha=0.5)


def test_save_times_are_kept():
    sol = run_fd(square_data(), 1.0, 0.1, 0.5, save_every=10**9, save_times=[0.5])
    assert np.min(np.abs(sol.times - 0.5)) <= sol.config.h_t
    assert sol.final_time == pytest.approx(1.0, abs=sol.config.h_t)
