"""Time evolution of the damped power-nonlinearity wave equation.

The solution is evolved through the first-order expansion u = z + v: z
is the linear evolution of the (typically randomized) data, always
re-evaluated exactly from its initial coefficients, and the remainder v
solves

    v_tt - Lap v + 2 mu D v_t + (v + z)^p = 0,   (v, v_t)(0) = (0, 0),

with p odd.  Unperturbed runs take z = 0 and march the data itself.
Each step applies the exact phase-space flow to the state and a
quadrature rule to the Duhamel integral of the nonlinearity: the
midpoint exponential rule (order 2, the default) or the endpoint
trapezoid rule, whose discrete equations are exactly the fixed-point
equations of the Picard iteration on the same mesh.  Powers are
computed alias-free by zero padding to a fine grid before the pointwise
product.

Blow-up is a flag, never a NaN: any overflow in the power or any state
norm beyond the configured ceiling raises :class:`BlowUpError` carrying
the offending time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, RealField, SpectralField, StatePair, forward_transform, \
    inverse_transform, synthesize
from .multipliers import low_pass_symbol
from .norms import lebesgue_norm, spectral_pair_norm
from .propagators import flow_symbols, normalized_velocity_symbols
from .wiener import RandomizedPair

__all__ = [
    "SolverParams",
    "BlowUpError",
    "LinearForcing",
    "LinearTrajectory",
    "Trajectory",
    "PicardResult",
    "linear_flow",
    "nonlinearity",
    "dealiased_power",
    "duhamel_step",
    "evolve",
    "evolve_full",
    "evolve_truncated",
    "picard_solve_local",
]

_RULES = ("midpoint", "trapezoid")


@dataclass(frozen=True)
class SolverParams:
    """Knobs of the time marcher.

    dt is the macro step; each macro step may be subdivided into
    ``substeps`` equal quadrature substeps.  States are recorded every
    ``snapshot_every`` macro steps (the initial and final states always
    are).  The blow-up ceiling on the 𝓗^{s0}-type pair norm is
    ``blowup_factor * (1 + initial pair norm)``; the additive 1 keeps
    the ceiling meaningful for data starting at or near zero.
    """

    p: int = 5
    mu: float = 0.5
    dt: float = 1.0 / 256.0
    substeps: int = 1
    padding: int = 3
    rule: str = "midpoint"
    delta: float = 0.2
    picard_tol: float = 1e-10
    picard_max_iter: int = 12
    snapshot_every: int = 1
    blowup_factor: float = 1e6

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 3 or self.p % 2 == 0:
            raise ValueError(f"nonlinearity power p={self.p!r} must be an odd integer >= 3")
        if not (0.0 < self.mu < 1.0):
            raise ValueError(f"viscosity mu={self.mu} must lie in (0, 1)")
        if not (self.dt > 0.0) or not math.isfinite(self.dt):
            raise ValueError(f"step size dt={self.dt} must be positive")
        if not isinstance(self.substeps, (int, np.integer)) or self.substeps < 1:
            raise ValueError(f"substeps={self.substeps!r} must be a positive integer")
        if not isinstance(self.padding, (int, np.integer)) or self.padding < (self.p + 1) // 2:
            raise ValueError(
                f"padding factor {self.padding!r} too small for p={self.p} "
                f"(need >= {(self.p + 1) // 2} for alias-free products)"
            )
        if self.rule not in _RULES:
            raise ValueError(f"unknown quadrature rule {self.rule!r}; expected one of {_RULES}")
        if not (self.delta > 0.0):
            raise ValueError(f"exponent bump delta={self.delta} must be positive")
        if self.picard_tol < 0.0:
            raise ValueError(f"picard_tol={self.picard_tol} must be >= 0")
        if not isinstance(self.picard_max_iter, (int, np.integer)) or self.picard_max_iter < 1:
            raise ValueError(f"picard_max_iter={self.picard_max_iter!r} must be >= 1")
        if not isinstance(self.snapshot_every, (int, np.integer)) or self.snapshot_every < 1:
            raise ValueError(f"snapshot_every={self.snapshot_every!r} must be >= 1")
        if not (self.blowup_factor > 0.0):
            raise ValueError(f"blowup_factor={self.blowup_factor} must be positive")

    @property
    def s0(self) -> float:
        """Regularity of the local solution class for the pair (p+delta, 10)."""
        return 1.0 - 1.0 / (self.p + self.delta) - 0.2


class BlowUpError(RuntimeError):
    """The evolution left the configured norm ceiling (or overflowed)."""

    def __init__(self, time, message: str):
        super().__init__(message)
        self.time = time


def _power_overflow_guard(values: np.ndarray, p: int):
    with np.errstate(over="ignore", invalid="ignore"):
        powered = values ** p
    if not np.all(np.isfinite(powered)):
        raise BlowUpError(None, f"pointwise power |u|^{p} overflowed")
    return powered


def _pad_indices(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, 1.0 / n).astype(int)


def dealiased_power(grid: Grid, coeffs: np.ndarray, p: int, padding: int) -> np.ndarray:
    """Coefficients of field^p, computed on a zero-padded fine grid.

    The input coefficients are placed at their signed frequencies inside
    a grid finer by ``padding``, the power is taken pointwise there, and
    the product spectrum is cropped back.  For padding >= (p+1)/2 the
    result is alias-free.  Nyquist rows of the output are zeroed: their
    aliased halves fall outside the cropped band, so keeping them would
    reintroduce an asymmetric remnant.
    """
    n = grid.n
    if padding < 1:
        raise ValueError(f"padding factor {padding} must be >= 1")
    ix = _pad_indices(n)
    if padding == 1:
        fine = np.asarray(coeffs, dtype=np.complex128)
        m = n
    else:
        m = padding * n
        fine = np.zeros((m, m), dtype=np.complex128)
        fine[np.ix_(ix, ix)] = coeffs
    values = (np.fft.ifft2(fine) * (m * m)).real
    powered = _power_overflow_guard(values, p)
    cpow = np.fft.fft2(powered) / (m * m)
    out = cpow[np.ix_(ix, ix)] if padding > 1 else cpow
    out = np.array(out)
    out[n // 2, :] = 0.0
    out[:, n // 2] = 0.0
    return out


def nonlinearity(v: RealField, z: RealField | None, p: int = 5, padding: int = 3) -> RealField:
    """The power (v + z)^p, dealiased; pass z=None for v alone.

    Overflow of the pointwise power raises :class:`BlowUpError` rather
    than propagating NaN.
    """
    grid = v.grid
    if z is not None:
        if z.grid != grid:
            raise ValueError("v and z live on different grids")
        total = forward_transform(v).coeffs + forward_transform(z).coeffs
    else:
        total = forward_transform(v).coeffs
    out = dealiased_power(grid, total, p, padding)
    return inverse_transform(SpectralField(grid, out))


class LinearForcing:
    """Exact evaluation of the damped linear flow of a stored data pair.

    Holds the spectral coefficients of the data and evaluates position,
    velocity, or normalized-velocity coefficients at any t >= 0 through
    the closed-form symbols; nothing is ever interpolated.
    """

    def __init__(self, grid: Grid, c0: np.ndarray, c1: np.ndarray, mu: float = 0.5):
        self.grid = grid
        self.c0 = np.asarray(c0, dtype=np.complex128)
        self.c1 = np.asarray(c1, dtype=np.complex128)
        if self.c0.shape != grid.shape or self.c1.shape != grid.shape:
            raise ValueError("coefficient arrays do not match the grid")
        self.mu = float(mu)

    @classmethod
    def from_pair(cls, pair: StatePair | RandomizedPair, mu: float = 0.5) -> "LinearForcing":
        if isinstance(pair, RandomizedPair):
            pair = pair.pair
        return cls(
            pair.grid,
            forward_transform(pair.position).coeffs,
            forward_transform(pair.velocity).coeffs,
            mu,
        )

    def coeffs_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        pp, pv, vp, vv = flow_symbols(self.grid, t, self.mu)
        return pp * self.c0 + pv * self.c1, vp * self.c0 + vv * self.c1

    def position_coeffs(self, t: float) -> np.ndarray:
        pp, pv, _, _ = flow_symbols(self.grid, t, self.mu)
        return pp * self.c0 + pv * self.c1

    def position(self, t: float) -> RealField:
        return inverse_transform(SpectralField(self.grid, self.position_coeffs(t)))

    def state_at(self, t: float) -> StatePair:
        p, v = self.coeffs_at(t)
        return StatePair(
            inverse_transform(SpectralField(self.grid, p)),
            inverse_transform(SpectralField(self.grid, v)),
        )

    def tilde_coeffs(self, t: float) -> np.ndarray:
        fp, fv = normalized_velocity_symbols(self.grid, t, self.mu)
        return fp * self.c0 + fv * self.c1


@dataclass(frozen=True)
class LinearTrajectory:
    """Sampled linear evolution z with its normalized velocity z-tilde.

    Samples are exact symbol evaluations; ``at``/``tilde_at``/``state_at``
    re-evaluate at arbitrary times from the stored data coefficients.
    """

    source: StatePair | RandomizedPair
    times: tuple[float, ...]
    z: tuple[RealField, ...]
    z_tilde: tuple[RealField, ...]
    mu: float = 0.5

    def __post_init__(self):
        if not (len(self.times) == len(self.z) == len(self.z_tilde)):
            raise ValueError("times and sample sequences have mismatched lengths")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")

    @property
    def grid(self) -> Grid:
        return self.z[0].grid if self.z else self._forcing().grid

    def _forcing(self) -> LinearForcing:
        return LinearForcing.from_pair(self.source, self.mu)

    def at(self, t: float) -> RealField:
        return self._forcing().position(t)

    def tilde_at(self, t: float) -> RealField:
        forcing = self._forcing()
        return inverse_transform(SpectralField(forcing.grid, forcing.tilde_coeffs(t)))

    def state_at(self, t: float) -> StatePair:
        return self._forcing().state_at(t)


def linear_flow(pair: StatePair | RandomizedPair, times, mu: float = 0.5) -> LinearTrajectory:
    """Sample the linear evolution of a data pair at sorted times >= 0."""
    times = [float(t) for t in times]
    if any(t < 0 or not math.isfinite(t) for t in times):
        raise ValueError("sample times must be finite and >= 0")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("sample times must be strictly increasing")
    forcing = LinearForcing.from_pair(pair, mu)
    grid = forcing.grid
    z = []
    zt = []
    for t in times:
        z.append(inverse_transform(SpectralField(grid, forcing.position_coeffs(t))))
        zt.append(inverse_transform(SpectralField(grid, forcing.tilde_coeffs(t))))
    return LinearTrajectory(pair, tuple(times), tuple(z), tuple(zt), mu)


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of the nonlinear remainder v along a run.

    ``linear`` is the trajectory of the perturbing z sampled at the same
    times, or None for unperturbed (z = 0) runs.
    """

    times: tuple[float, ...]
    states: tuple[StatePair, ...]
    linear: LinearTrajectory | None
    params: SolverParams

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states have mismatched lengths")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("snapshot times must be strictly increasing")

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    def index_of(self, t: float) -> int:
        """Index of the snapshot at time t (within rounding)."""
        arr = np.asarray(self.times)
        i = int(np.argmin(np.abs(arr - t)))
        if abs(arr[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}; nearest is {arr[i]}")
        return i

    def state_at(self, t: float) -> StatePair:
        return self.states[self.index_of(t)]


@dataclass(frozen=True)
class PicardResult:
    """Fixed-point iteration outcome: iterate snapshots and distances."""

    trajectory: Trajectory
    distances: tuple[float, ...]
    converged: bool
    contraction_failed: bool
    iterations: int


def _steps_for(T: float, dt: float) -> int:
    return max(1, int(math.ceil(T / dt - 1e-9)))


def _real_values(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    return synthesize(grid, coeffs).real


class _Marcher:
    """Shared stepping core operating on spectral coefficient pairs."""

    def __init__(self, grid: Grid, params: SolverParams, h: float):
        self.grid = grid
        self.params = params
        self.h = h
        self.full = flow_symbols(grid, h, params.mu)
        self.half = flow_symbols(grid, h / 2.0, params.mu)

    def force(self, position_coeffs: np.ndarray, z_coeffs: np.ndarray | None) -> np.ndarray:
        total = position_coeffs if z_coeffs is None else position_coeffs + z_coeffs
        return -dealiased_power(self.grid, total, self.params.p, self.params.padding)

    def advance_linear(self, zc):
        if zc is None:
            return None
        pp, pv, vp, vv = self.full
        return pp * zc[0] + pv * zc[1], vp * zc[0] + vv * zc[1]

    def midpoint_step(self, c0, c1, zc):
        pp, pv, vp, vv = self.full
        pph, pvh, _, vvh = self.half
        mid = pph * c0 + pvh * c1
        zmid = None if zc is None else pph * zc[0] + pvh * zc[1]
        F = self.force(mid, zmid)
        new0 = pp * c0 + pv * c1 + self.h * (pvh * F)
        new1 = vp * c0 + vv * c1 + self.h * (vvh * F)
        return new0, new1, None

    def trapezoid_step(self, c0, c1, zc, z_next, F0):
        pp, pv, vp, vv = self.full
        if F0 is None:
            F0 = self.force(c0, None if zc is None else zc[0])
        half_h = 0.5 * self.h
        new0 = pp * c0 + pv * c1 + half_h * (pv * F0)
        b1 = vp * c0 + vv * c1 + half_h * (vv * F0)
        F1 = self.force(new0, None if z_next is None else z_next[0])
        new1 = b1 + half_h * F1
        return new0, new1, F1


def _march(grid: Grid, params: SolverParams, z0: tuple | None, v0: tuple, T: float,
           hook=None, linear_source=None) -> Trajectory:
    """March v across [0, T]; z0/v0 are spectral coefficient pairs."""
    if not (T > 0.0) or not math.isfinite(T):
        raise ValueError(f"final time T={T} must be positive and finite")
    macro = _steps_for(T, params.dt)
    micro = macro * params.substeps
    h = T / micro
    stepper = _Marcher(grid, params, h)
    c0, c1 = v0
    zc = z0
    ceiling = params.blowup_factor * (1.0 + spectral_pair_norm(grid, c0, c1, params.s0))

    snap_times = [0.0]
    snap_states = [_coeff_state(grid, c0, c1)]
    if hook is not None:
        hook(0.0, snap_states[0])
    F_carry = None
    for k in range(1, micro + 1):
        t = k * h
        z_next = stepper.advance_linear(zc)
        try:
            if params.rule == "midpoint":
                c0, c1, F_carry = stepper.midpoint_step(c0, c1, zc)
            else:
                c0, c1, F_carry = stepper.trapezoid_step(c0, c1, zc, z_next, F_carry)
        except BlowUpError as err:
            raise BlowUpError(t, f"power overflow at t={t:.6g}") from err
        zc = z_next
        norm = spectral_pair_norm(grid, c0, c1, params.s0)
        if not math.isfinite(norm) or norm > ceiling:
            raise BlowUpError(t, f"pair norm {norm:.3e} exceeded ceiling {ceiling:.3e} at t={t:.6g}")
        at_macro = k % params.substeps == 0
        macro_index = k // params.substeps
        if at_macro and (macro_index % params.snapshot_every == 0 or macro_index == macro):
            state = _coeff_state(grid, c0, c1)
            snap_times.append(t)
            snap_states.append(state)
            if hook is not None:
                hook(t, state)

    linear = None
    if linear_source is not None:
        linear = _sample_linear(linear_source, grid, z0, tuple(snap_times), params.mu)
    return Trajectory(tuple(snap_times), tuple(snap_states), linear, params)


def _coeff_state(grid: Grid, c0: np.ndarray, c1: np.ndarray) -> StatePair:
    return StatePair(
        inverse_transform(SpectralField(grid, c0)),
        inverse_transform(SpectralField(grid, c1)),
    )


def _sample_linear(source, grid: Grid, z0: tuple, times: tuple, mu: float) -> LinearTrajectory:
    forcing = LinearForcing(grid, z0[0], z0[1], mu)
    if source is None:
        source = _coeff_state(grid, z0[0], z0[1])
    z = []
    zt = []
    for t in times:
        z.append(inverse_transform(SpectralField(grid, forcing.position_coeffs(t))))
        zt.append(inverse_transform(SpectralField(grid, forcing.tilde_coeffs(t))))
    return LinearTrajectory(source, times, tuple(z), tuple(zt), mu)


def duhamel_step(state: StatePair, t: float, dt: float, forcing: LinearForcing | None,
                 params: SolverParams) -> StatePair:
    """One macro step of the Duhamel march from time t to t + dt.

    The linear part of the update is exact; the nonlinearity enters
    through the configured quadrature rule over ``params.substeps``
    substeps.  dt must not exceed params.dt.
    """
    if dt <= 0 or dt > params.dt * (1.0 + 1e-12):
        raise ValueError(f"step dt={dt} must lie in (0, params.dt={params.dt}]")
    grid = state.grid
    h = dt / params.substeps
    stepper = _Marcher(grid, params, h)
    c0 = forward_transform(state.position).coeffs
    c1 = forward_transform(state.velocity).coeffs
    zc = None if forcing is None else forcing.coeffs_at(t)
    F_carry = None
    for _ in range(params.substeps):
        z_next = stepper.advance_linear(zc)
        if params.rule == "midpoint":
            c0, c1, F_carry = stepper.midpoint_step(c0, c1, zc)
        else:
            c0, c1, F_carry = stepper.trapezoid_step(c0, c1, zc, z_next, F_carry)
        zc = z_next
    return _coeff_state(grid, c0, c1)


def _data_coeffs(pair: StatePair | RandomizedPair):
    if isinstance(pair, RandomizedPair):
        pair = pair.pair
    return forward_transform(pair.position).coeffs, forward_transform(pair.velocity).coeffs


def evolve(data: StatePair, T: float, params: SolverParams, hook=None) -> Trajectory:
    """Evolve the equation directly from a data pair, with no z part."""
    grid = data.grid
    return _march(grid, params, None, _data_coeffs(data), T, hook=hook)


def evolve_full(pair: StatePair | RandomizedPair, T: float, params: SolverParams,
                v_init: StatePair | None = None, hook=None) -> Trajectory:
    """Evolve the remainder v driven by the linear flow z of the pair.

    v starts from rest unless ``v_init`` is given; the returned
    trajectory carries the z samples at the snapshot times, so that
    u = z + v is reconstructible on demand.
    """
    grid = pair.grid
    z0 = _data_coeffs(pair)
    if v_init is None:
        zero = np.zeros(grid.shape, dtype=np.complex128)
        v0 = (zero, zero.copy())
    else:
        if v_init.grid != grid:
            raise ValueError("v_init grid does not match the data grid")
        v0 = _data_coeffs(v_init)
    return _march(grid, params, z0, v0, T, hook=hook, linear_source=pair)


def evolve_truncated(pair: StatePair | RandomizedPair, N: float, T: float,
                     params: SolverParams, v_init: StatePair | None = None,
                     hook=None) -> Trajectory:
    """Evolve with data (and hence z) truncated to frequencies |xi| <= N."""
    if not (N > 0.0):
        raise ValueError(f"truncation frequency N={N} must be positive")
    grid = pair.grid
    mask = low_pass_symbol(grid, N)
    c0, c1 = _data_coeffs(pair)
    z0 = (mask * c0, mask * c1)
    if v_init is None:
        zero = np.zeros(grid.shape, dtype=np.complex128)
        v0 = (zero, zero.copy())
    else:
        iv0, iv1 = _data_coeffs(v_init)
        v0 = (mask * iv0, mask * iv1)
    return _march(grid, params, z0, v0, T, hook=hook, linear_source=pair)


def _trapezoid(values: np.ndarray, times: np.ndarray) -> float:
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(times)))


def _z_distance(grid: Grid, times, old_p, old_q, new_p, new_q, s0: float, q_exp: float) -> float:
    """Z(T)-style distance: sup-in-time pair norm plus mixed L^q_t L^10_x."""
    sup = 0.0
    lr_pow = np.empty(len(times))
    for k in range(len(times)):
        dp = new_p[k] - old_p[k]
        dq = new_q[k] - old_q[k]
        sup = max(sup, spectral_pair_norm(grid, dp, dq, s0))
        diff = inverse_transform(SpectralField(grid, dp))
        lr_pow[k] = lebesgue_norm(diff, 10.0) ** q_exp
    mixed = _trapezoid(lr_pow, np.asarray(times)) ** (1.0 / q_exp)
    return sup + mixed


def picard_solve_local(init: StatePair, forcing: LinearForcing | None, T: float,
                       params: SolverParams) -> PicardResult:
    """Run the Picard fixed-point iteration on the coarse mesh over [0, T].

    The iteration starts from the linear flow of ``init`` and applies
    the Duhamel map with trapezoid quadrature; its fixed point satisfies
    exactly the discrete equations of the trapezoid march.  Successive
    iterate distances (sup-in-time pair norm at regularity s0 plus the
    mixed L^{5+delta}_t L^10_x norm of the position difference) are
    returned; a contraction failure is flagged after three consecutive
    non-decreasing distances, which signals that T is too large.
    """
    if not (T > 0.0) or not math.isfinite(T):
        raise ValueError(f"local time T={T} must be positive and finite")
    grid = init.grid
    steps = _steps_for(T, params.dt)
    h = T / steps
    times = tuple(k * h for k in range(steps + 1))
    stepper = _Marcher(grid, params, h)
    pp, pv, vp, vv = stepper.full

    zc = None if forcing is None else forcing.coeffs_at(0.0)
    z_pos = []
    cursor = zc
    for k in range(steps + 1):
        z_pos.append(None if cursor is None else cursor[0])
        cursor = stepper.advance_linear(cursor)

    i0 = forward_transform(init.position).coeffs
    i1 = forward_transform(init.velocity).coeffs
    lin_p, lin_q = [i0], [i1]
    for k in range(steps):
        lin_p.append(pp * lin_p[-1] + pv * lin_q[-1])
        lin_q.append(vp * lin_p[-2] + vv * lin_q[-1])

    ceiling = params.blowup_factor * (1.0 + spectral_pair_norm(grid, i0, i1, params.s0))
    cur_p, cur_q = list(lin_p), list(lin_q)
    distances: list[float] = []
    converged = False
    failed = False
    rising = 0
    floor = 1e-12

    for sweep in range(params.picard_max_iter):
        try:
            F = [stepper.force(cur_p[k], z_pos[k]) for k in range(steps + 1)]
        except BlowUpError:
            failed = True
            break
        new_p, new_q = [i0], [i1]
        acc_p = np.zeros(grid.shape, dtype=np.complex128)
        acc_q = np.zeros(grid.shape, dtype=np.complex128)
        half_h = 0.5 * h
        for k in range(steps):
            src_q = acc_q + half_h * F[k]
            acc_p, acc_q = pp * acc_p + pv * src_q, vp * acc_p + vv * src_q
            acc_q = acc_q + half_h * F[k + 1]
            new_p.append(lin_p[k + 1] + acc_p)
            new_q.append(lin_q[k + 1] + acc_q)
        d = _z_distance(grid, times, cur_p, cur_q, new_p, new_q, params.s0, 5.0 + params.delta)
        distances.append(d)
        cur_p, cur_q = new_p, new_q
        scale = max(1.0, distances[0])
        sup_norm = max(spectral_pair_norm(grid, cur_p[k], cur_q[k], params.s0)
                       for k in range(steps + 1))
        if not math.isfinite(sup_norm) or sup_norm > ceiling:
            failed = True
            break
        if d == 0.0 or d < params.picard_tol:
            converged = True
            break
        if len(distances) >= 2:
            prev = distances[-2]
            if d >= prev and d > floor * scale:
                rising += 1
                if rising >= 3:
                    failed = True
                    break
            else:
                rising = 0

    states = tuple(_coeff_state(grid, cur_p[k], cur_q[k]) for k in range(steps + 1))
    linear = None
    if forcing is not None:
        linear = _sample_linear(None, grid, (forcing.c0, forcing.c1), times, params.mu)
    traj = Trajectory(times, states, linear, params)
    return PicardResult(traj, tuple(distances), converged, failed, len(distances))
