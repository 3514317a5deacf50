from __future__ import annotations

import math

import numpy as np
import pytest

from vortexmass.characteristics import square_rarefaction_m
from vortexmass.shocks import (
    ShockIntegrationError,
    TwoBumpParams,
    lax_oleinik_check,
    rh_residual,
    rh_speed,
    rk4_integrate,
    spurious_square,
    two_bump_solve,
)

CASES = [
    TwoBumpParams(1.0, 1.0, 1.5, 2.5, 0.5),
    TwoBumpParams(1.0, 2.0, 2.0, 3.0, 0.5),
    TwoBumpParams(0.5, 3.0, 1.2, 1.6, 0.3),
    TwoBumpParams(2.0, 0.5, 1.5, 4.0, 0.7),
]


def test_rh_speed_cases():
    assert rh_speed(1.0, 0.25, 0.0, 0.5) == pytest.approx(2.0)
    # equal states: characteristic speed a u^{a-1} m
    assert rh_speed(1.0, 1.0, 1.0, 0.5) == pytest.approx(0.5)
    assert rh_speed(2.0, 0.0, 0.0, 0.5) == 0.0
    near = rh_speed(1.0, 1.0, 1.0 + 1e-13, 0.5)
    assert near == pytest.approx(0.5, rel=1e-9)
    with pytest.raises(ValueError):
        rh_speed(-1.0, 1.0, 0.5, 0.5)


def test_rk4_exact_for_cubic():
    path = rk4_integrate(lambda t, s: 3 * t**2, 1.0, 2.0, 0.1)
    assert path.positions[-1] == pytest.approx(9.0, rel=1e-14)
    assert path.error_estimate < 1e-12


def test_rk4_constant_speed_exact():
    path = rk4_integrate(lambda t, s: 0.7, 2.0, 3.0, 0.01)
    np.testing.assert_allclose(path.positions, 2.0 + 0.7 * path.times, rtol=1e-14)


def test_rk4_against_closed_form():
    # S' = S/(1 + t/2), S(0) = 1 has S = (1 + t/2)^2
    rhs = lambda t, s: s / (1 + 0.5 * t)  # noqa: E731
    path = rk4_integrate(rhs, 1.0, 2.0, 1e-3)
    assert abs(path.positions[-1] - 4.0) < 1e-8


def test_rk4_fourth_order():
    errs = [abs(rk4_integrate(lambda t, s: s, 1.0, 1.0, h, estimate_error=False).positions[-1] - math.e) for h in (0.1, 0.05)]
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.1)
    # the step-halving estimate tracks the true error
    path = rk4_integrate(lambda t, s: s, 1.0, 1.0, 0.1)
    assert path.error_estimate == pytest.approx(errs[0] * 15 / 16 / 15, rel=0.2)


def test_rk4_raises_on_blowup():
    with pytest.raises(ShockIntegrationError):
        rk4_integrate(lambda t, s: 1.0 / (0.5 - t) if t != 0.5 else float("inf"), 0.0, 1.0, 0.25)


def test_spurious_shock_conserves_mass():
    path, sp = spurious_square(1.0, 1.0, 0.5, 1.0)
    assert sp.S(1.0) == pytest.approx(2.25)
    for t in (0.0, 0.4, 1.0):
        assert sp.mass_at_shock(t) == pytest.approx(1.0)
    # its speed is the Rankine-Hugoniot speed with u_r = 0
    for t, v in zip(path.times, path.speeds):
        assert v == pytest.approx(rh_speed(sp.mass_at_shock(t), sp.flat(t), 0.0, 0.5))


def test_spurious_fails_lax_oleinik():
    path, sp = spurious_square(1.0, 1.0, 0.5, 1.0)
    rep = lax_oleinik_check(sp, path, 0.5)
    assert rep.none_passed


@pytest.mark.parametrize("params", CASES)
def test_two_bump_path(params):
    path, sol = two_bump_solve(params, 2.0, 1e-3)
    res = [rh_residual(v, sol.mass_at_shock(t), sol.u_left(t), sol.u_right(t), params.alpha) for t, v in zip(path.times, path.speeds)]
    assert max(res) < 1e-8
    assert lax_oleinik_check(sol, path, params.alpha).all_passed
    assert np.all(np.diff(path.positions) > 0)
    # the pasted mass is continuous across the shock
    gap = [abs(sol.m1(t, s) - sol.m2(t, s)) for t, s in zip(path.times, path.positions)]
    assert max(gap) < 1e-6


def test_two_bump_mass_conservation():
    params = CASES[0]
    path, sol = two_bump_solve(params, 1.0, 1e-3)
    assert sol.m(1.0, 1e9) == pytest.approx(params.mass, rel=1e-4)
    # left of the shock the solution is the square fan
    rho = np.linspace(0, 0.95 * path.positions[-1], 50)
    np.testing.assert_allclose(sol.m(1.0, rho), square_rarefaction_m(1.0, 1.0, 0.5, 1.0, rho))


def test_two_bump_params_validated():
    with pytest.raises(ValueError):
        TwoBumpParams(1.0, 1.0, 0.5, 2.0, 0.5)
    with pytest.raises(ValueError):
        TwoBumpParams(1.0, 1.0, 1.5, 2.0, 1.5)


def test_step_check_stops_integration():
    def check(t, s):
        if s > 1.5:
            raise ShockIntegrationError(f"left the valid region at t={t}")

    with pytest.raises(ShockIntegrationError, match="valid region"):
        rk4_integrate(lambda t, s: 1.0, 1.0, 2.0, 0.1, check=check)
