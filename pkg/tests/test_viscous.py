from __future__ import annotations

import numpy as np
import pytest

from vortexmass.characteristics import eval_m, square_data
from vortexmass.hjfd import FDConfig, derive_u, fd_step
from vortexmass.viscous import (
    StabilityError,
    ViscousConfig,
    boundary_layer_width,
    diffusion_coefficient,
    run_viscous,
    stable_h_t,
    vanishing_viscosity_study,
    viscous_step,
)


def config(**kw):
    base = dict(epsilon=0.01, alpha=0.5, dim=1, h_rho=0.01, h_t=1e-4, rho_max=1.0, T=1.0, u0_sup=1.0, M=1.0)
    base.update(kw)
    return ViscousConfig(**base)


def test_diffusion_coefficient():
    assert diffusion_coefficient(0.7, 0.1, 1) == pytest.approx(0.4)
    # d = 2: (2 sqrt(pi))^2 rho = 4 pi rho
    assert diffusion_coefficient(0.5, 1.0, 2) == pytest.approx(2 * np.pi)
    assert diffusion_coefficient(0.0, 1.0, 3) == 0.0


def test_constant_interior_row():
    cfg = config()
    row = np.full(cfg.n_rho + 1, 0.5)
    row[0], row[-1] = 0.0, cfg.M
    new = viscous_step(row, cfg)
    # away from both ends: gradient 0 and diffusion 0
    np.testing.assert_allclose(new[3:-3], 0.5 * (1 - cfg.epsilon**0.5 * cfg.h_t))
    assert new[0] == 0.0 and new[-1] == cfg.M


def test_stability_enforced():
    with pytest.raises(StabilityError):
        config(h_t=0.1).check()
    h = stable_h_t(0.01, 0.5, 1, 0.01, 1.0, 1.0, 1.0)
    config(h_t=h).check()
    with pytest.raises(StabilityError):
        run_viscous(square_data(), 0.01, 0.5, 1.0, rho_max=2.0, h_rho=0.01, h_t=0.05)


def test_transport_term_matches_scheme_without_diffusion():
    # with delta = eps the two updates differ only through the -eps^a shift
    eps, al = 1e-2, 0.5
    fd = FDConfig(eps, al, h_rho=0.01, h_t=1e-5, rho_max=1.0, T=1.0, M_bar=1.0)
    h_t = fd.h_t
    cfg = config(epsilon=eps, h_rho=fd.h_rho, h_t=h_t, rho_max=fd.n_rho * fd.h_rho)
    rho = fd.h_rho * np.arange(fd.n_rho + 1)
    row = np.minimum(rho, 0.5) * 0.8
    lin = np.zeros(fd.n_rho - 1)  # switch the diffusion off
    v = viscous_step(row, cfg, _diff=lin)[1:-1]
    f = fd_step(row, fd)[1:-1]
    s = np.maximum(np.diff(row) / fd.h_rho, 0)[:-1]
    expected_v = row[1:-1] * (1 - h_t * (s + eps) ** al)
    np.testing.assert_allclose(v, expected_v, rtol=1e-14)
    expected_f = row[1:-1] / (1 + h_t * ((s + eps) ** al - eps**al))
    np.testing.assert_allclose(f, expected_f, rtol=1e-14)


def test_zero_data():
    sol = run_viscous(lambda r: 0.0 * r, 0.1, 0.5, 0.5, rho_max=1.0, h_rho=0.02)
    assert np.all(sol.values == 0.0)


@pytest.mark.parametrize("dim", [1, 2])
def test_maximum_principle_and_monotonicity(dim):
    d = square_data()
    sol = run_viscous(d, 0.01, 0.5, 1.0, rho_max=4.0, h_rho=5e-3, dim=dim)
    assert np.all(sol.values >= -1e-12) and np.all(sol.values <= d.mass + 1e-12)
    assert np.all(np.diff(sol.values, axis=1) >= -1e-12)
    inner = sol.rho <= sol.config.rho_max - boundary_layer_width(sol.config)
    u = derive_u(sol)[:, inner]
    assert np.all(u <= d.sup + 1e-10)


def test_dimension_only_changes_diffusion():
    d = square_data()
    a = run_viscous(d, 1e-3, 0.5, 1.0, rho_max=3.0, h_rho=5e-3, dim=1)
    b = run_viscous(d, 1e-3, 0.5, 1.0, rho_max=3.0, h_rho=5e-3, dim=2)
    win = a.rho <= 2.0
    ref = eval_m(1.0, a.rho[win], d, 0.5)
    assert np.max(np.abs(a.final[win] - ref)) < 0.03
    assert np.max(np.abs(b.final[win] - ref)) < 0.03


def test_grid_refinement_self_convergence():
    d = square_data()
    eps = 0.05
    sols = [run_viscous(d, eps, 0.5, 0.5, rho_max=3.0, h_rho=h) for h in (0.02, 0.01, 0.005)]
    r = np.linspace(0, 2, 41)
    vals = [np.interp(r, s.rho, s.final) for s in sols]
    assert np.max(np.abs(vals[1] - vals[2])) < np.max(np.abs(vals[0] - vals[2]))


def test_study_validates_sequence():
    with pytest.raises(ValueError):
        vanishing_viscosity_study(square_data(), [0.01, 0.1], 1.0, 0.5)
    with pytest.raises(ValueError):
        vanishing_viscosity_study(square_data(), [0.1], 1.0, 0.5, reference=3.0)
