from __future__ import annotations

import numpy as np
import pytest

from vortexmass.analysis import (
    check_global_bound,
    comparison_test,
    mass_rel_error,
    radial_evaluator,
    relative_error_profile,
    rescale_profile,
    residual_mass_eq,
    self_similar_u_rho,
    tail_relative_error,
)
from vortexmass.characteristics import eval_m, eval_u, gap_data, square_data
from vortexmass.exact import SelfSimilarParams, friendly_giant, profile_F, self_similar_mass, self_similar_u
from vortexmass.shocks import SpuriousSquare

Y = np.concatenate([[0.0], np.geomspace(1e-3, 50, 300)])


@pytest.mark.parametrize("d", [1, 2, 3])
def test_rescaled_self_similar_is_profile(d):
    p = SelfSimilarParams(0.5, 2.0, d)
    U = lambda t, x: self_similar_u(p, t, x)  # noqa: E731
    a = rescale_profile(U, 0.5, d, 1.0, Y)
    b = rescale_profile(U, 0.5, d, 37.0, Y)
    np.testing.assert_allclose(a.w, b.w, rtol=1e-12)
    np.testing.assert_allclose(a.w, profile_F(p, Y), rtol=1e-12)
    assert a.is_nonincreasing()
    assert relative_error_profile(U, 2.0, 0.5, d, 5.0, Y) < 1e-12


def test_rescaled_giant_is_constant():
    al = 0.4
    giant = lambda t, x: friendly_giant(None, al, t, infinite=True) + 0.0 * np.asarray(x)  # noqa: E731
    w = rescale_profile(giant, al, 2, 3.0, Y).w
    np.testing.assert_allclose(w, al ** (-1 / al), rtol=1e-12)


def test_rescale_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        rescale_profile(lambda t, x: x, 0.5, 1, 0.0, Y)


def test_square_center_approaches_profile_value():
    d = square_data()
    u = radial_evaluator(lambda t, r: eval_u(t, r, d, 0.5), 1)
    w0 = [rescale_profile(u, 0.5, 1, t, [0.0]).w[0] for t in (1, 10, 100, 1000)]
    assert np.all(np.diff(np.abs(np.array(w0) - 4.0)) < 0)


def test_mass_rel_error_of_self_similar_mass():
    p = SelfSimilarParams(0.5, 3.0)
    m = lambda t, r: self_similar_mass(p, np.asarray(r) * t ** (-2.0))  # noqa: E731
    assert mass_rel_error(m, 3.0, 0.5, 7.0, np.geomspace(0.1, 100, 50), 0.1) < 1e-13


def test_gap_mass_error_does_not_vanish_near_zero():
    d = gap_data(1.0, 1.0, 0.5)
    m = lambda t, r: eval_m(t, r, d, 0.5)  # noqa: E731
    k = np.geomspace(1e-9, 1e3, 200)
    errs = [mass_rel_error(m, d.mass, 0.5, t, k, 1e-9) for t in (10, 100, 1000)]
    assert min(errs) == pytest.approx(1.0)


def test_tail_error_decreases():
    d = square_data()
    e = tail_relative_error(lambda t, r: eval_u(t, r, d, 0.5), 1.0, 0.5, 1.0, np.geomspace(2, 1e6, 10))
    assert np.all(np.diff(e) < 0)
    assert self_similar_u_rho(1.0, 0.5, 2.0, 0.0) == pytest.approx(friendly_giant(None, 0.5, 2.0, infinite=True))


def test_global_bound():
    al = 0.5
    t = np.array([0.5, 1.0, 4.0])
    rho = np.linspace(0, 3, 31)
    linear = lambda tt, r: (al * tt) ** (-1 / al) * r  # noqa: E731
    rep = check_global_bound(linear, al, t, rho)
    assert rep.ok and rep.worst_ratio == pytest.approx(1.0)
    assert check_global_bound(lambda tt, r: 0 * r, al, t, rho).ok
    d = square_data(5.0, 2.0)
    assert check_global_bound(lambda tt, r: eval_m(tt, r, d, al), al, t, rho).ok
    bad = check_global_bound(lambda tt, r: 2 * linear(tt, r), al, t, rho)
    assert not bad and bad.worst_ratio == pytest.approx(2.0)
    with pytest.raises(ValueError):
        check_global_bound(linear, al, [0.0], rho)


def _samples(m, t, rho):
    return np.array([m(tt, rho) for tt in t])


def test_residual_second_order_for_self_similar():
    p = SelfSimilarParams(0.5, 1.0)
    m = lambda t, r: self_similar_mass(p, np.asarray(r) * t ** (-2.0))  # noqa: E731
    res = []
    for n in (21, 41, 81):
        t = np.linspace(1.0, 2.0, n)
        rho = np.linspace(0.5, 3.0, n)
        res.append(residual_mass_eq(_samples(m, t, rho), t, rho, 0.5).sup)
    rates = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(rates > 1.6) and rates[-1] > rates[0]


def test_residual_linear_mass_is_tiny():
    lin = lambda t, r: (0.5 * t) ** (-2.0) * r  # noqa: E731
    # only the time difference has truncation error; it decays at second order
    res = []
    for n in (51, 101, 201):
        t = np.linspace(1, 2, n)
        rho = np.linspace(0, 1, n)
        res.append(residual_mass_eq(_samples(lin, t, rho), t, rho, 0.5).sup)
    assert res[-1] < 1e-3
    assert res[0] / res[1] == pytest.approx(4, rel=0.1) and res[1] / res[2] == pytest.approx(4, rel=0.1)


def test_residual_concentrates_at_spurious_shock():
    sp = SpuriousSquare(1.0, 1.0, 0.5)
    sups = []
    for n in (41, 81, 161):
        t = np.linspace(0.5, 1.0, n)
        rho = np.linspace(0.0, 3.0, n)
        r = residual_mass_eq(_samples(sp.m, t, rho), t, rho, 0.5)
        sups.append(r.sup)
        j = np.unravel_index(np.argmax(np.abs(r.values)), r.values.shape)
        assert abs(rho[1 + j[1]] - sp.S(t[1 + j[0]])) < 3 * (rho[1] - rho[0])
    assert min(sups) > 0.1


def test_residual_grid_too_small():
    with pytest.raises(ValueError):
        residual_mass_eq(np.zeros((2, 5)), [0, 1], np.arange(5.0), 0.5)


def test_comparison():
    big, small = square_data(2.0, 1.0), square_data(1.0, 1.0)
    samples = [(t, np.linspace(0, 5, 101)) for t in (0.1, 1.0, 10.0)]
    u1 = lambda t, r: eval_u(t, r, big, 0.5)  # noqa: E731
    u2 = lambda t, r: eval_u(t, r, small, 0.5)  # noqa: E731
    assert comparison_test(u1, u2, samples)
    assert not comparison_test(u2, u1, samples)
    assert comparison_test(u2, u2, samples)
    giant = lambda t, r: friendly_giant(2.0, 0.5, t) + 0 * r  # noqa: E731
    assert comparison_test(giant, u1, samples)
