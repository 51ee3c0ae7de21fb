"""Measured quantities: energy bookkeeping, mixed norms, rate and tail fits.

Everything here is a pure function of immutable trajectories or
ensembles of precomputed scalars.  Time integrals use the composite
trapezoid rule over the stored snapshots, space integrals the midpoint
quadrature of the field samples, and Sobolev quantities exact lattice
sums, so that every report is reproducible bit for bit from persisted
snapshots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grid import Grid, RealField, SpectralField, StatePair, forward_transform, \
    inverse_transform
from .multipliers import bessel_symbol, poisson_symbol, frac_laplacian_symbol
from .norms import homogeneous_norm, lebesgue_norm, pair_norm
from .solver import BlowUpError, LinearTrajectory, SolverParams, Trajectory, evolve

__all__ = [
    "energy",
    "EnergyRecord",
    "energy_record",
    "DissipationReport",
    "dissipation_check",
    "DecompositionReport",
    "energy_increment_decomposition",
    "mixed_norm",
    "AQuantity",
    "a_quantity",
    "GronwallReport",
    "gronwall_check",
    "AdmissibilityReport",
    "admissibility",
    "scaling_regularity",
    "critical_exponent",
    "RateFit",
    "schauder_rate_fit",
    "TailFit",
    "tail_fit",
    "EventReport",
    "randomized_strichartz_event",
    "InflationRow",
    "norm_inflation_probe",
]


def energy(state: StatePair, p: int = 5) -> float:
    """Energy of a phase-space point: gradient + kinetic + potential.

    E = 1/2 ||grad v||_2^2 + 1/2 ||v_t||_2^2 + 1/(p+1) ||v||_{p+1}^{p+1},
    with the gradient term as an exact lattice sum and the potential by
    midpoint quadrature.
    """
    g = homogeneous_norm(state.position, 1.0)
    k = lebesgue_norm(state.velocity, 2.0)
    u = lebesgue_norm(state.position, float(p + 1))
    return 0.5 * g * g + 0.5 * k * k + u ** (p + 1) / (p + 1)


def _energy_parts(state: StatePair, p: int) -> tuple[float, float, float, float]:
    g = homogeneous_norm(state.position, 1.0)
    k = lebesgue_norm(state.velocity, 2.0)
    u = lebesgue_norm(state.position, float(p + 1))
    grad = 0.5 * g * g
    kin = 0.5 * k * k
    pot = u ** (p + 1) / (p + 1)
    return grad + kin + pot, grad, kin, pot


@dataclass(frozen=True)
class EnergyRecord:
    """Per-snapshot energy budget of a trajectory.

    ``dissipation`` holds -||v_t||_{Hdot^{1/2}}^2, the exact decay rate
    of the energy for unperturbed runs; it is nonpositive by
    construction.
    """

    times: tuple[float, ...]
    total: tuple[float, ...]
    gradient: tuple[float, ...]
    kinetic: tuple[float, ...]
    potential: tuple[float, ...]
    dissipation: tuple[float, ...]


def energy_record(traj: Trajectory) -> EnergyRecord:
    """Evaluate the energy budget at every stored snapshot."""
    p = traj.params.p
    rows = [_energy_parts(s, p) for s in traj.states]
    diss = [-(homogeneous_norm(s.velocity, 0.5) ** 2) for s in traj.states]
    total, grad, kin, pot = (tuple(r[i] for r in rows) for i in range(4))
    return EnergyRecord(traj.times, total, grad, kin, pot, tuple(diss))


@dataclass(frozen=True)
class DissipationReport:
    """Centered-difference check of the energy dissipation identity."""

    times: tuple[float, ...]
    discrepancy: tuple[float, ...]
    max_discrepancy: float
    max_energy_increase: float


def dissipation_check(traj: Trajectory) -> DissipationReport:
    """Compare centered dE/dt against the dissipation rate, z = 0 only.

    The identity dE/dt = -||v_t||_{Hdot^{1/2}}^2 holds for the
    unperturbed flow; trajectories carrying a nonzero z sample are
    rejected.  The discrepancy at interior snapshots is O(dt^2).
    """
    if traj.linear is not None:
        raise ValueError("dissipation identity requires an unperturbed (z = 0) run")
    if len(traj.times) < 3:
        raise ValueError("need at least 3 snapshots for centered differences")
    rec = energy_record(traj)
    t = np.asarray(rec.times)
    e = np.asarray(rec.total)
    d = np.asarray(rec.dissipation)
    rate = (e[2:] - e[:-2]) / (t[2:] - t[:-2])
    disc = np.abs(rate - d[1:-1])
    increases = np.diff(e)
    return DissipationReport(
        times=tuple(t[1:-1]),
        discrepancy=tuple(disc),
        max_discrepancy=float(disc.max()),
        max_energy_increase=float(max(increases.max(), 0.0)),
    )


def _space_integral(grid: Grid, values: np.ndarray) -> float:
    h = grid.spacing
    return float(np.sum(values) * h * h)


def _window_indices(times, t0: float, t1: float) -> list[int]:
    tol = 1e-9 * max(1.0, abs(t1))
    return [i for i, t in enumerate(times) if t0 - tol <= t <= t1 + tol]


@dataclass(frozen=True)
class DecompositionReport:
    """Energy-increment decomposition over [T0, t].

    I is the work of z against the potential flux, II the work against
    the cross terms of the expanded power; I splits by parts into the
    boundary difference of I1 and the bulk term I2 driven by
    <grad> z-tilde.  ``residual`` is |I - (I1(t) - I1(T0)) - I2| and
    scales as O(dt^2); ``bound_gap`` is I + II - (E(t) - E(T0)), which
    is nonnegative up to quadrature error because dissipation only
    removes energy.
    """

    t_start: float
    t_end: float
    work_linear: float
    work_cross: float
    boundary_start: float
    boundary_end: float
    bulk: float
    residual: float
    energy_increment: float
    bound_gap: float


def energy_increment_decomposition(traj: Trajectory, t0: float, t1: float) -> DecompositionReport:
    """Integrate the two work terms of the energy budget and check (by
    parts) that the linear work equals its boundary + bulk form.

    Requires a trajectory evolved with a stored linear part (z and
    z-tilde samples).
    """
    if traj.linear is None:
        raise ValueError("decomposition requires stored z and z-tilde samples")
    if traj.linear.times != traj.times:
        raise ValueError("linear samples are not aligned with the snapshot times")
    idx = _window_indices(traj.times, t0, t1)
    if len(idx) < 3:
        raise ValueError(f"need at least 3 snapshots in [{t0}, {t1}]")
    grid = traj.grid
    p = traj.params.p
    if p != 5:
        raise ValueError("the cross-term expansion is implemented for the quintic power")
    bracket = bessel_symbol(grid, 1.0)

    times = np.asarray([traj.times[i] for i in idx])
    linear = traj.linear
    i_integrand = np.empty(len(idx))
    ii_integrand = np.empty(len(idx))
    i2_integrand = np.empty(len(idx))
    boundary = np.empty(len(idx))
    for row, i in enumerate(idx):
        v = traj.states[i].position.samples
        w = traj.states[i].velocity.samples
        z = linear.z[i].samples
        zt = linear.z_tilde[i]
        v5 = v ** 5
        i_integrand[row] = -_space_integral(grid, z * 5.0 * v ** 4 * w)
        cross = 10.0 * z ** 2 * v ** 3 + 10.0 * z ** 3 * v ** 2 + 5.0 * z ** 4 * v + z ** 5
        ii_integrand[row] = -_space_integral(grid, w * cross)
        dz = inverse_transform(
            SpectralField(grid, bracket * forward_transform(zt).coeffs)
        ).samples
        i2_integrand[row] = _space_integral(grid, dz * v5)
        boundary[row] = -_space_integral(grid, z * v5)

    def trap(y):
        return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(times)))

    work_linear = trap(i_integrand)
    work_cross = trap(ii_integrand)
    bulk = trap(i2_integrand)
    residual = abs(work_linear - (boundary[-1] - boundary[0]) - bulk)
    e_start = energy(traj.states[idx[0]], p)
    e_end = energy(traj.states[idx[-1]], p)
    increment = e_end - e_start
    return DecompositionReport(
        t_start=float(times[0]),
        t_end=float(times[-1]),
        work_linear=work_linear,
        work_cross=work_cross,
        boundary_start=float(boundary[0]),
        boundary_end=float(boundary[-1]),
        bulk=bulk,
        residual=residual,
        energy_increment=increment,
        bound_gap=work_linear + work_cross - increment,
    )


def _traj_samples(traj) -> tuple[tuple[float, ...], tuple[RealField, ...]]:
    if isinstance(traj, LinearTrajectory):
        return traj.times, traj.z
    if isinstance(traj, Trajectory):
        return traj.times, tuple(s.position for s in traj.states)
    raise TypeError(f"expected a Trajectory or LinearTrajectory, got {type(traj).__name__}")


def _mixed_from_fields(times, fields, q: float, r: float) -> float:
    norms = np.asarray([lebesgue_norm(f, r) for f in fields])
    if math.isinf(q):
        return float(norms.max())
    if q < 1:
        raise ValueError(f"time exponent q={q} must be >= 1 (or inf)")
    t = np.asarray(times)
    powed = norms ** q
    return float(np.sum(0.5 * (powed[1:] + powed[:-1]) * np.diff(t)) ** (1.0 / q))


def mixed_norm(traj, q: float, r: float, interval: tuple[float, float] | None = None) -> float:
    """Mixed space-time norm L^q([t0,t1]; L^r) of the sampled fields.

    For a Trajectory the position component is measured; for a
    LinearTrajectory, its z samples.  Time integration is composite
    trapezoid over the snapshots inside the interval (at least 4
    required); q = inf takes the maximum over samples.
    """
    times, fields = _traj_samples(traj)
    if interval is not None:
        idx = _window_indices(times, interval[0], interval[1])
    else:
        idx = list(range(len(times)))
    if len(idx) < 4:
        raise ValueError(f"need at least 4 samples in the interval, have {len(idx)}")
    sel_t = [times[i] for i in idx]
    sel_f = [fields[i] for i in idx]
    return _mixed_from_fields(sel_t, sel_f, q, r)


@dataclass(frozen=True)
class AQuantity:
    """The six-term size function of the perturbing linear evolution.

    total = 1 + sup-in-time ||z||_inf^2 + ||z||_{L^10 L^10}^10
    + sup-in-time ||z||_{L^6}^6 + ||z-tilde||_{L^6 L^6}^6
    + sup-in-time ||<grad>^{s1} z-tilde||_inf, over the window [t0, t1].
    """

    t0: float
    t1: float
    s1: float
    z_sup_sq: float
    z_ten: float
    z_six_sup: float
    zt_six: float
    zt_smooth_sup: float

    @property
    def total(self) -> float:
        return 1.0 + self.z_sup_sq + self.z_ten + self.z_six_sup + self.zt_six \
            + self.zt_smooth_sup


def a_quantity(linear: LinearTrajectory, t0: float, t1: float, s1: float = 0.55) -> AQuantity:
    """Assemble the size function of z over [t0, t1] from its samples."""
    idx = _window_indices(linear.times, t0, t1)
    if len(idx) < 4:
        raise ValueError(f"need at least 4 linear samples in [{t0}, {t1}], have {len(idx)}")
    grid = linear.z[0].grid
    times = [linear.times[i] for i in idx]
    z = [linear.z[i] for i in idx]
    zt = [linear.z_tilde[i] for i in idx]
    sym = bessel_symbol(grid, s1)
    zt_smooth = [
        inverse_transform(SpectralField(grid, sym * forward_transform(f).coeffs)) for f in zt
    ]
    return AQuantity(
        t0=float(times[0]),
        t1=float(times[-1]),
        s1=float(s1),
        z_sup_sq=_mixed_from_fields(times, z, math.inf, math.inf) ** 2,
        z_ten=_mixed_from_fields(times, z, 10.0, 10.0) ** 10,
        z_six_sup=_mixed_from_fields(times, z, math.inf, 6.0) ** 6,
        zt_six=_mixed_from_fields(times, zt, 6.0, 6.0) ** 6,
        zt_smooth_sup=_mixed_from_fields(times, zt_smooth, math.inf, math.inf),
    )


@dataclass(frozen=True)
class GronwallReport:
    """Fitted integral-inequality constant and its exponential envelope."""

    constant: float
    a_total: float
    envelope_holds: bool
    t0: float
    t1: float


def gronwall_check(record: EnergyRecord, size: AQuantity, t0: float, t1: float) -> GronwallReport:
    """Smallest K with E(t) <= K [E(t0) + A + A int_{t0}^t E] on the window.

    A zero energy record satisfies the inequality trivially; K is
    reported as 1 in that case.  The exponential envelope
    E(t) <= K (E(t0) + A) exp(K A (t - t0)) is then checked pointwise.
    """
    idx = _window_indices(record.times, t0, t1)
    if len(idx) < 2:
        raise ValueError(f"need at least 2 energy samples in [{t0}, {t1}]")
    t = np.asarray([record.times[i] for i in idx])
    e = np.asarray([record.total[i] for i in idx])
    a = size.total
    cumulative = np.concatenate(
        ([0.0], np.cumsum(0.5 * (e[1:] + e[:-1]) * np.diff(t)))
    )
    denom = e[0] + a + a * cumulative
    k = 1.0 if e.max() == 0.0 else float((e / denom).max())
    envelope = k * (e[0] + a) * np.exp(k * a * (t - t[0]))
    holds = bool(np.all(e <= envelope * (1.0 + 1e-9) + 1e-300))
    return GronwallReport(constant=k, a_total=a, envelope_holds=holds,
                          t0=float(t[0]), t1=float(t[-1]))


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, float) and math.isinf(x):
        return None
    return Fraction(x)


def _reciprocal(x) -> Fraction:
    f = _as_fraction(x)
    return Fraction(0) if f is None else 1 / f


@dataclass(frozen=True)
class AdmissibilityReport:
    """Exact admissibility arithmetic for an exponent pair."""

    q: object
    r: object
    sigma: object
    d: int
    sigma_admissible: bool
    scaling_regularity: Fraction


def critical_exponent(d: int, p: int) -> Fraction:
    """Scaling-critical Sobolev index d/2 - 2/(p-1)."""
    return Fraction(d, 2) - Fraction(2, p - 1)


def scaling_regularity(q, r, d: int = 2) -> Fraction:
    """The regularity s with 1/q + d/r = d/2 - s, exact arithmetic."""
    return Fraction(d, 2) - _reciprocal(q) - d * _reciprocal(r)


def admissibility(q, r, sigma, d: int = 2) -> AdmissibilityReport:
    """Check sigma-admissibility: 2/q + 2 sigma/r <= sigma, within range.

    Exponents are validated to lie in [2, inf]; the single forbidden
    endpoint (q, r, sigma) = (2, inf, 1) is excluded explicitly.
    Arithmetic is exact over rationals (floats are taken at their exact
    binary value), so hand-checkable cases come out exactly.
    """
    for name, val in (("q", q), ("r", r)):
        fv = _as_fraction(val)
        if fv is not None and fv < 2:
            raise ValueError(f"exponent {name}={val} out of range [2, inf]")
    qf, rf, sf = _as_fraction(q), _as_fraction(r), _as_fraction(sigma)
    forbidden = qf == 2 and rf is None and sf == 1
    ok = (not forbidden) and 2 * _reciprocal(q) + 2 * sf * _reciprocal(r) <= sf
    return AdmissibilityReport(
        q=q, r=r, sigma=sigma, d=d,
        sigma_admissible=bool(ok),
        scaling_regularity=scaling_regularity(q, r, d),
    )


@dataclass(frozen=True)
class RateFit:
    """Log-log regression of a smoothing ratio against time."""

    slope: float
    intercept: float
    r_squared: float
    reference_slope: float
    degenerate: bool
    times: tuple[float, ...]
    ratios: tuple[float, ...]


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Least squares y = a x + b; returns (a, b, r_squared, se_a)."""
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise ValueError("regression abscissae are all equal")
    a = float(np.sum((x - xm) * (y - ym)) / sxx)
    b = ym - a * xm
    resid = y - (a * x + b)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    se = math.sqrt(ss_res / max(n - 2, 1) / sxx)
    return a, b, r2, se


def schauder_rate_fit(field: RealField, alpha: float, p: float, q: float,
                      t_grid) -> RateFit:
    """Fit the decay exponent of ||D^alpha P(t) f||_q / ||f||_p over t.

    The reference exponent is -alpha - 2 (1/p - 1/q) in two dimensions.
    Times are restricted to t <= L/8: beyond that the periodic images
    overlap and the free-space kernel scaling is lost.  A fit with
    R^2 < 0.9 is flagged degenerate rather than rejected.
    """
    grid = field.grid
    t_grid = [float(t) for t in t_grid]
    if len(t_grid) < 3:
        raise ValueError("need at least 3 fit times")
    if any(t <= 0 for t in t_grid):
        raise ValueError("fit times must be positive")
    if max(t_grid) > grid.length / 8.0 + 1e-12:
        raise ValueError(
            f"fit time {max(t_grid)} beyond the wrap-around guard L/8 = {grid.length / 8.0}"
        )
    if not (1 <= p <= q):
        raise ValueError(f"exponents must satisfy 1 <= p <= q, got p={p}, q={q}")
    denom = lebesgue_norm(field, p)
    if denom == 0.0:
        raise ValueError("zero probe field")
    coeffs = forward_transform(field).coeffs
    damp = frac_laplacian_symbol(grid, alpha)
    ratios = []
    for t in t_grid:
        sym = damp * poisson_symbol(grid, t)
        out = inverse_transform(SpectralField(grid, sym * coeffs))
        ratios.append(lebesgue_norm(out, q) / denom)
    x = np.log(np.asarray(t_grid))
    y = np.log(np.asarray(ratios))
    slope, intercept, r2, _ = _ols(x, y)
    reference = -alpha - 2.0 * (1.0 / p - (0.0 if math.isinf(q) else 1.0 / q))
    return RateFit(
        slope=slope,
        intercept=intercept,
        r_squared=r2,
        reference_slope=reference,
        degenerate=bool(r2 < 0.9),
        times=tuple(t_grid),
        ratios=tuple(ratios),
    )


@dataclass(frozen=True)
class TailFit:
    """Exceedance-tail regression log P(X > lambda) = log C - c lambda^2/scale."""

    lam: tuple[float, ...]
    p_hat: tuple[float, ...]
    wilson_low: tuple[float, ...]
    wilson_high: tuple[float, ...]
    scale: float
    ensemble: int
    c: float
    log_c0: float
    c_se: float
    r_squared: float
    n_fit: int
    insufficient_tail: bool

    def c_band(self, z: float = 1.96) -> tuple[float, float]:
        """Confidence band for the curvature coefficient c."""
        return self.c - z * self.c_se, self.c + z * self.c_se


def _wilson(p_hat: np.ndarray, n: int, z: float = 1.96) -> tuple[np.ndarray, np.ndarray]:
    denom = 1.0 + z * z / n
    center = (p_hat + z * z / (2 * n)) / denom
    half = (z / denom) * np.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n))
    return np.clip(center - half, 0.0, 1.0), np.clip(center + half, 0.0, 1.0)


def tail_fit(values, lam_grid, scale: float,
             window: tuple[float, float] = (0.001, 0.5)) -> TailFit:
    """Fit the subgaussian tail shape of an ensemble of norm values.

    Empirical exceedance probabilities are computed on the lambda grid
    with Wilson score intervals; ordinary least squares of log p against
    lambda^2/scale runs over the grid points whose p falls inside the
    window (zero-count points are reported but never fitted).  The
    fitted curvature c should be positive; otherwise, or when fewer
    than 3 points fall in the window, the fit is flagged.
    """
    values = np.asarray(sorted(float(v) for v in values))
    n = len(values)
    if n < 500:
        raise ValueError(f"ensemble of {n} too small for a tail fit (need >= 500)")
    if not (scale > 0.0) or not math.isfinite(scale):
        raise ValueError(f"scale {scale} must be positive and finite")
    lam = np.asarray([float(x) for x in lam_grid])
    if np.any(lam < 0) or np.any(np.diff(lam) <= 0):
        raise ValueError("lambda grid must be nonnegative and strictly increasing")
    counts = n - np.searchsorted(values, lam, side="right")
    p_hat = counts / n
    lo, hi = _wilson(p_hat, n)
    mask = (p_hat >= window[0]) & (p_hat <= window[1])
    x = lam[mask] ** 2 / scale
    y = np.log(p_hat[mask])
    insufficient = int(mask.sum()) < 3
    if insufficient:
        slope, intercept, r2, se = math.nan, math.nan, math.nan, math.nan
    else:
        slope, intercept, r2, se = _ols(x, y)
    c = -slope if not insufficient else math.nan
    if not insufficient and not (c > 0):
        insufficient = True
    return TailFit(
        lam=tuple(lam),
        p_hat=tuple(p_hat),
        wilson_low=tuple(lo),
        wilson_high=tuple(hi),
        scale=float(scale),
        ensemble=n,
        c=c,
        log_c0=intercept,
        c_se=se,
        r_squared=r2,
        n_fit=int(mask.sum()),
        insufficient_tail=insufficient,
    )


@dataclass(frozen=True)
class EventReport:
    """Empirical probability that an ensemble norm stays below a threshold."""

    threshold: float
    probability: float
    complement: float
    standard_error: float
    ensemble: int


def randomized_strichartz_event(values, threshold: float) -> EventReport:
    """Empirical P(norm <= threshold) over an ensemble of norm values."""
    values = np.asarray([float(v) for v in values])
    n = len(values)
    if n < 1:
        raise ValueError("empty ensemble")
    p = float(np.mean(values <= threshold))
    se = math.sqrt(p * (1 - p) / n)
    return EventReport(threshold=float(threshold), probability=p,
                       complement=1.0 - p, standard_error=se, ensemble=n)


@dataclass(frozen=True)
class InflationRow:
    """Amplification of the pair norm at index s for one family member."""

    label: str
    initial_norm: float
    peak_norm: float
    peak_time: float
    ceiling_hit: bool

    @property
    def amplification(self) -> float:
        return self.peak_norm / self.initial_norm if self.initial_norm > 0 else math.inf


def norm_inflation_probe(members, s: float, t_probe: float,
                         params: SolverParams) -> tuple[InflationRow, ...]:
    """Evolve a family of deterministic data and record norm growth at index s.

    Each member is a (label, StatePair); the probe reports the peak pair
    norm over [0, t_probe] relative to the initial one.  A run that
    leaves the solver ceiling is recorded as inflated beyond it rather
    than raised.  This is a trend demonstration, not a proof surrogate.
    """
    rows = []
    for label, data in members:
        initial = pair_norm(data, s)
        peak = {"norm": initial, "time": 0.0}

        def watch(t, state, peak=peak):
            norm = pair_norm(state, s)
            if norm > peak["norm"]:
                peak["norm"] = norm
                peak["time"] = t

        hit = False
        try:
            evolve(data, t_probe, params, hook=watch)
        except BlowUpError as err:
            hit = True
            if err.time is not None:
                peak["time"] = err.time
        rows.append(InflationRow(
            label=str(label),
            initial_norm=initial,
            peak_norm=peak["norm"],
            peak_time=peak["time"],
            ceiling_hit=hit,
        ))
    return tuple(rows)
