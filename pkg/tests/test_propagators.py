"""Tests for the exact mode-by-mode damped wave propagators."""

import math

import numpy as np
import pytest

from vnlw.grid import Grid, StatePair, forward_transform
from vnlw.multipliers import bessel_potential, poisson_smooth
from vnlw.profiles import rough_pair, single_mode_pair, zero_field
from vnlw.propagators import (
    flow_symbols,
    linear_flow_pair,
    linear_position,
    normalized_velocity,
    normalized_velocity_symbols,
    undamped_position,
    undamped_symbols,
    velocity_kernel,
    velocity_kernel_rate,
)


def _rk4_matrix(r, mu, t, steps=20000):
    """Integrate the mode ODE y'' + r^2 y + 2 mu r y' = 0 from identity data.

    Classical fourth-order Runge-Kutta on the companion system, in plain
    Python floats, so the result is independent of the closed forms under
    test.  Returns the 2x2 propagator (pp, pv, vp, vv).
    """
    h = t / steps

    def deriv(y0, y1):
        return y1, -(r * r) * y0 - 2.0 * mu * r * y1

    def advance(y0, y1):
        k10, k11 = deriv(y0, y1)
        k20, k21 = deriv(y0 + 0.5 * h * k10, y1 + 0.5 * h * k11)
        k30, k31 = deriv(y0 + 0.5 * h * k20, y1 + 0.5 * h * k21)
        k40, k41 = deriv(y0 + h * k30, y1 + h * k31)
        return (
            y0 + h * (k10 + 2.0 * k20 + 2.0 * k30 + k40) / 6.0,
            y1 + h * (k11 + 2.0 * k21 + 2.0 * k31 + k41) / 6.0,
        )

    pp, vp = 1.0, 0.0
    pv, vv = 0.0, 1.0
    for _ in range(steps):
        pp, vp = advance(pp, vp)
        pv, vv = advance(pv, vv)
    return pp, pv, vp, vv


@pytest.mark.parametrize("mu", [0.5, 0.3])
@pytest.mark.parametrize("r_index", [(1, 0), (2, 3)])
def test_symbols_match_ode_integration(mu, r_index):
    grid = Grid(16, 16.0)
    t = 1.25
    symbols = flow_symbols(grid, t, mu)
    i, j = r_index
    r = float(grid.k_abs[i, j])
    oracle = _rk4_matrix(r, mu, t)
    for got, want in zip(symbols, oracle):
        assert got[i, j] == pytest.approx(want, abs=5e-12)


def test_time_zero_is_identity():
    grid = Grid(16, 8.0)
    pp, pv, vp, vv = flow_symbols(grid, 0.0)
    assert np.array_equal(pp, np.ones_like(pp))
    assert np.array_equal(pv, np.zeros_like(pv))
    assert np.array_equal(vp, np.zeros_like(vp))
    assert np.array_equal(vv, np.ones_like(vv))


def test_zero_mode_limits():
    grid = Grid(16, 8.0)
    t = 0.7
    pp, pv, vp, vv = flow_symbols(grid, t)
    assert pp[0, 0] == 1.0
    assert pv[0, 0] == t
    assert vp[0, 0] == 0.0
    assert vv[0, 0] == 1.0


@pytest.mark.parametrize("mu", [0.5, 0.3])
def test_group_property(mu):
    grid = Grid(32, 16.0)
    s, t = 0.45, 0.3
    m_s = flow_symbols(grid, s, mu)
    m_t = flow_symbols(grid, t, mu)
    m_sum = flow_symbols(grid, s + t, mu)
    composed = (
        m_t[0] * m_s[0] + m_t[1] * m_s[2],
        m_t[0] * m_s[1] + m_t[1] * m_s[3],
        m_t[2] * m_s[0] + m_t[3] * m_s[2],
        m_t[2] * m_s[1] + m_t[3] * m_s[3],
    )
    for got, want in zip(composed, m_sum):
        assert np.max(np.abs(got - want)) <= 1e-12


def test_damped_flow_factors_through_poisson_smoothing():
    grid = Grid(32, 16.0)
    pair = rough_pair(grid, seed=5)
    for mu in (0.5, 0.3):
        for t in (0.2, 1.0, 3.0):
            direct = linear_position(pair, t, mu)
            factored = poisson_smooth(undamped_position(pair, t, mu), 2.0 * mu * t)
            assert np.max(np.abs(direct.samples - factored.samples)) <= 1e-12


def test_undamped_factor_has_unit_weight_at_origin():
    grid = Grid(16, 8.0)
    pp, pv = undamped_symbols(grid, 0.9)
    assert pp[0, 0] == 1.0
    assert pv[0, 0] == 0.9


def test_finite_difference_residual_is_second_order():
    # Centered differences in t applied to each symbol should leave a
    # residual in the mode ODE that shrinks by ~4x per halving of dt.
    grid = Grid(16, 16.0)
    mu = 0.5
    t = 0.8

    def residual(dt):
        plus = flow_symbols(grid, t + dt, mu)
        mid = flow_symbols(grid, t, mu)
        minus = flow_symbols(grid, t - dt, mu)
        worst = 0.0
        for a, b, c in zip(plus, mid, minus):
            second = (a - 2.0 * b + c) / dt**2
            first = (a - c) / (2.0 * dt)
            res = second + grid.k_abs**2 * b + 2.0 * mu * grid.k_abs * first
            worst = max(worst, float(np.max(np.abs(res))))
        return worst

    coarse = residual(2e-3)
    fine = residual(1e-3)
    assert 3.2 <= coarse / fine <= 4.8


def test_single_mode_amplitude_follows_damped_oscillation():
    grid = Grid(64, 32.0)
    amp = 0.75
    pair = single_mode_pair(grid, index=(2, 0), amplitude=amp)
    r = 2.0 * (2.0 * math.pi / 32.0)
    t = 1.0
    pp_oracle, _, _, _ = _rk4_matrix(r, 0.5, t)
    moved = linear_position(pair, t)
    assert np.max(np.abs(moved.samples - pp_oracle * pair.position.samples)) <= 1e-10


def test_velocity_row_is_time_derivative_of_position_row():
    grid = Grid(32, 16.0)
    pair = rough_pair(grid, seed=7)
    t, dt = 1.1, 1e-5
    flowed = linear_flow_pair(pair, t)
    plus = linear_position(pair, t + dt)
    minus = linear_position(pair, t - dt)
    rate = (plus.samples - minus.samples) / (2.0 * dt)
    assert np.max(np.abs(rate - flowed.velocity.samples)) <= 1e-6


def test_normalized_velocity_matches_smoothed_velocity():
    grid = Grid(32, 16.0)
    pair = rough_pair(grid, seed=9)
    t = 0.6
    direct = normalized_velocity(pair, t)
    via_flow = bessel_potential(linear_flow_pair(pair, t).velocity, -1.0)
    assert np.max(np.abs(direct.samples - via_flow.samples)) <= 1e-12


def test_normalized_velocity_at_time_zero():
    grid = Grid(32, 16.0)
    pair = rough_pair(grid, seed=11)
    got = normalized_velocity(pair, 0.0)
    want = bessel_potential(pair.velocity, -1.0)
    assert np.max(np.abs(got.samples - want.samples)) <= 1e-13
    fp, fv = normalized_velocity_symbols(grid, 0.0)
    assert np.array_equal(fp, np.zeros_like(fp))
    assert np.max(np.abs(fv - 1.0 / grid.bracket_k)) == 0.0


def test_velocity_kernel_and_rate():
    grid = Grid(32, 16.0)
    pair = rough_pair(grid, seed=13)
    field = pair.position
    t = 0.8
    impulse = StatePair(zero_field(grid), field)
    # velocity_kernel(field, t) is the position response to data (0, field)
    flowed = linear_flow_pair(impulse, t)
    got = velocity_kernel(field, t)
    assert np.max(np.abs(got.samples - flowed.position.samples)) <= 1e-13
    got_rate = velocity_kernel_rate(field, t)
    assert np.max(np.abs(got_rate.samples - flowed.velocity.samples)) <= 1e-13
    at_zero = velocity_kernel(field, 0.0)
    assert np.max(np.abs(at_zero.samples)) == 0.0
    rate_zero = velocity_kernel_rate(field, 0.0)
    assert np.max(np.abs(rate_zero.samples - field.samples)) <= 1e-14


def test_flow_preserves_reality_and_spectrum_support():
    grid = Grid(32, 16.0)
    pair = single_mode_pair(grid, index=(3, 1), amplitude=1.0)
    moved = linear_flow_pair(pair, 2.0)
    assert np.all(np.isfinite(moved.position.samples))
    coeffs = forward_transform(moved.position).coeffs
    mask = np.abs(coeffs) > 1e-14
    live = {(int(i), int(j)) for i, j in zip(*np.nonzero(mask))}
    assert live == {(3, 1), (29, 31)}


def test_invalid_arguments_are_rejected():
    grid = Grid(16, 8.0)
    with pytest.raises(ValueError, match="time"):
        flow_symbols(grid, -0.1)
    with pytest.raises(ValueError, match="time"):
        flow_symbols(grid, float("nan"))
    for bad_mu in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError, match="viscosity"):
            flow_symbols(grid, 1.0, bad_mu)
