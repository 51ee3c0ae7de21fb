"""Exact mode-by-mode propagators of the damped linear wave equation.

Each Fourier mode of the linear equation

    u_tt + |xi|^2 u + 2 mu |xi| u_t = 0,        0 < mu < 1,

is a damped oscillator with decay rate mu |xi| and shifted frequency
beta |xi|, beta = sqrt(1 - mu^2).  The solution with data (u0, u1) is
assembled from the closed-form symbols below; the zero mode has the
degenerate dynamics u(t) = u0 + t u1, which appears here as an explicit
removable-limit branch.  The damped flow factorizes exactly into
Poisson smoothing over the rescaled time 2 mu t composed with an
undamped (purely oscillatory, unitary-weight) factor.

The default viscosity is mu = 1/2, the form in which the equation is
evolved: decay e^{-|xi| t / 2} and frequency sqrt(3) |xi| / 2.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, RealField, StatePair, forward_transform, inverse_transform, SpectralField

__all__ = [
    "flow_symbols",
    "normalized_velocity_symbols",
    "undamped_symbols",
    "undamped_normalized_velocity_symbols",
    "linear_flow_pair",
    "linear_position",
    "velocity_kernel",
    "velocity_kernel_rate",
    "normalized_velocity",
    "undamped_position",
    "undamped_normalized_velocity",
]


def _check_time(t: float) -> float:
    t = float(t)
    if t < 0 or not np.isfinite(t):
        raise ValueError(f"propagator time t={t} must be finite and >= 0")
    return t


def _oscillator(mu: float) -> tuple[float, float]:
    """Validate the viscosity and return (mu, beta) with beta = sqrt(1-mu^2)."""
    mu = float(mu)
    if not (0.0 < mu < 1.0):
        raise ValueError(f"viscosity mu={mu} must lie in the oscillatory range (0, 1)")
    return mu, float(np.sqrt(1.0 - mu * mu))


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with the limit 1 at x = 0."""
    out = np.ones_like(x)
    nz = x != 0
    out[nz] = np.sin(x[nz]) / x[nz]
    return out


def flow_symbols(grid: Grid, t: float, mu: float = 0.5):
    """Phase-space symbols of the damped linear flow at time t.

    Returns
    -------
    (pos_from_pos, pos_from_vel, vel_from_pos, vel_from_vel)
        Four lattice arrays forming the 2x2 evolution matrix per mode:
        position(t) = pos_from_pos * u0 + pos_from_vel * u1 and likewise
        for the velocity.  ``pos_from_vel`` is the velocity-impulse
        kernel (limit t at xi = 0) and ``vel_from_vel`` its time
        derivative (limit 1 at xi = 0).
    """
    t = _check_time(t)
    mu, beta = _oscillator(mu)
    r = grid.k_abs
    a = beta * r * t
    decay = np.exp(-mu * r * t)
    cos_a = np.cos(a)
    sin_a = np.sin(a)
    ratio = mu / beta
    pos_from_pos = decay * (cos_a + ratio * sin_a)
    pos_from_vel = decay * t * _sinc(a)
    vel_from_pos = -(r / beta) * decay * sin_a
    vel_from_vel = decay * (cos_a - ratio * sin_a)
    return pos_from_pos, pos_from_vel, vel_from_pos, vel_from_vel


def normalized_velocity_symbols(grid: Grid, t: float, mu: float = 0.5):
    """Symbols of <grad>^{-1} applied to the velocity of the damped flow.

    Returns the two lattice arrays (from_pos, from_vel); at t = 0 the
    result reduces to <grad>^{-1} u1.
    """
    t = _check_time(t)
    mu, beta = _oscillator(mu)
    r = grid.k_abs
    bracket = grid.bracket_k
    a = beta * r * t
    decay = np.exp(-mu * r * t)
    from_pos = -(r / beta) / bracket * decay * np.sin(a)
    from_vel = decay * (np.cos(a) - (mu / beta) * np.sin(a)) / bracket
    return from_pos, from_vel


def undamped_symbols(grid: Grid, t: float, mu: float = 0.5):
    """Oscillatory factor of the flow: the symbols without Poisson decay."""
    t = _check_time(t)
    mu, beta = _oscillator(mu)
    r = grid.k_abs
    a = beta * r * t
    pos_from_pos = np.cos(a) + (mu / beta) * np.sin(a)
    pos_from_vel = t * _sinc(a)
    return pos_from_pos, pos_from_vel


def undamped_normalized_velocity_symbols(grid: Grid, t: float, mu: float = 0.5):
    t = _check_time(t)
    mu, beta = _oscillator(mu)
    r = grid.k_abs
    bracket = grid.bracket_k
    a = beta * r * t
    from_pos = -(r / beta) / bracket * np.sin(a)
    from_vel = (np.cos(a) - (mu / beta) * np.sin(a)) / bracket
    return from_pos, from_vel


def _pair_coeffs(pair: StatePair):
    return forward_transform(pair.position).coeffs, forward_transform(pair.velocity).coeffs


def _as_field(grid: Grid, coeffs: np.ndarray) -> RealField:
    return inverse_transform(SpectralField(grid, coeffs))


def linear_flow_pair(pair: StatePair, t: float, mu: float = 0.5) -> StatePair:
    """Evolve a data pair by the damped linear flow; returns (u, u_t) at t.

    The per-mode evolution matrices form a group, so flowing by t then s
    agrees with flowing by t + s to rounding accuracy.
    """
    grid = pair.grid
    pp, pv, vp, vv = flow_symbols(grid, t, mu)
    c0, c1 = _pair_coeffs(pair)
    return StatePair(
        _as_field(grid, pp * c0 + pv * c1),
        _as_field(grid, vp * c0 + vv * c1),
    )


def linear_position(pair: StatePair, t: float, mu: float = 0.5) -> RealField:
    """Position component of the damped linear flow at time t."""
    grid = pair.grid
    pp, pv, _, _ = flow_symbols(grid, t, mu)
    c0, c1 = _pair_coeffs(pair)
    return _as_field(grid, pp * c0 + pv * c1)


def velocity_kernel(field: RealField, t: float, mu: float = 0.5) -> RealField:
    """Position response at time t to the initial data (0, field).

    This is the kernel of the Duhamel integral; at t = 0 it vanishes and
    the zero mode responds linearly in t.
    """
    grid = field.grid
    _, pv, _, _ = flow_symbols(grid, t, mu)
    return _as_field(grid, pv * forward_transform(field).coeffs)


def velocity_kernel_rate(field: RealField, t: float, mu: float = 0.5) -> RealField:
    """Time derivative of :func:`velocity_kernel`; the identity at t = 0."""
    grid = field.grid
    _, _, _, vv = flow_symbols(grid, t, mu)
    return _as_field(grid, vv * forward_transform(field).coeffs)


def normalized_velocity(pair: StatePair, t: float, mu: float = 0.5) -> RealField:
    """<grad>^{-1} of the velocity of the damped linear flow at time t.

    Carries the same regularity as the position component, which is what
    makes it the convenient velocity-side bookkeeping quantity in the
    energy estimates.
    """
    grid = pair.grid
    fp, fv = normalized_velocity_symbols(grid, t, mu)
    c0, c1 = _pair_coeffs(pair)
    return _as_field(grid, fp * c0 + fv * c1)


def undamped_position(pair: StatePair, t: float, mu: float = 0.5) -> RealField:
    """Position of the oscillatory factor: the flow without Poisson decay.

    Composing with Poisson smoothing over the rescaled time 2 mu t
    reproduces the damped flow exactly, mode by mode.
    """
    grid = pair.grid
    pp, pv = undamped_symbols(grid, t, mu)
    c0, c1 = _pair_coeffs(pair)
    return _as_field(grid, pp * c0 + pv * c1)


def undamped_normalized_velocity(pair: StatePair, t: float, mu: float = 0.5) -> RealField:
    """Undamped factor of :func:`normalized_velocity`."""
    grid = pair.grid
    fp, fv = undamped_normalized_velocity_symbols(grid, t, mu)
    c0, c1 = _pair_coeffs(pair)
    return _as_field(grid, fp * c0 + fv * c1)
