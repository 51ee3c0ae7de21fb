"""End-to-end acceptance checks at the desk scale: a 256^2 grid of side 32.

One test per numbered criterion, so ``pytest -v tests/test_acceptance.py``
prints a single pass/fail line for each.  The Monte Carlo batch that
feeds the two tail criteria is module scoped and computed once; the
whole file runs in a few minutes on one core.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from vnlw.config import DataConfig, parse_config
from vnlw.diagnostics import (
    a_quantity,
    admissibility,
    critical_exponent,
    dissipation_check,
    energy_increment_decomposition,
    energy_record,
    gronwall_check,
    scaling_regularity,
    schauder_rate_fit,
    tail_fit,
)
from vnlw.experiments import default_lambda_grid, linear_norm_value, run_experiment
from vnlw.grid import Grid, RealField, StatePair
from vnlw.multipliers import poisson_symbol
from vnlw.norms import pair_norm, spectral_sobolev
from vnlw.profiles import gaussian_bump, rate_probe_field, rough_pair, zero_field
from vnlw.propagators import (
    flow_symbols,
    normalized_velocity_symbols,
    undamped_normalized_velocity_symbols,
    undamped_symbols,
)
from vnlw.seeding import split_seed
from vnlw.solver import (
    SolverParams,
    evolve,
    evolve_full,
    evolve_truncated,
    picard_solve_local,
)
from vnlw.wiener import (
    draw_coefficients,
    decomposition_norm_sq,
    randomized_coefficient_arrays,
    verify_subgaussian_moment,
)

GRID = Grid(256, 32.0)
S0 = 1.0 - 1.0 / 5.2 - 0.2
TAIL_Q = 5.2
TAIL_R = 10.0
TAIL_ENSEMBLE = 2000
TAIL_MASTER_SEED = 2026


def _pair_distance(a: StatePair, b: StatePair, s: float) -> float:
    diff = StatePair(
        RealField(GRID, a.position.samples - b.position.samples),
        RealField(GRID, a.velocity.samples - b.velocity.samples),
    )
    return pair_norm(diff, s)


def _sup_trajectory_distance(first, second, s: float) -> float:
    worst = 0.0
    for a, b in zip(first.states, second.states):
        worst = max(worst, _pair_distance(a, b, s))
    return worst


# ---------------------------------------------------------------------------
# criterion 1: the propagator symbols solve the damped mode oscillator
# ---------------------------------------------------------------------------


def _mode_ode_residual(symbol_at, dt: float, t: float = 1.0) -> float:
    """Max-norm residual of u'' + |xi|^2 u + |xi| u' at time t, mu = 1/2."""
    r = GRID.k_abs
    minus, center, plus = symbol_at(t - dt), symbol_at(t), symbol_at(t + dt)
    second = (plus - 2.0 * center + minus) / dt**2
    first = (plus - minus) / (2.0 * dt)
    return float(np.max(np.abs(second + r * r * center + r * first)))


def test_criterion_01_propagator_mode_ode_and_factorization():
    rows = []
    for i in range(4):
        rows.append(lambda t, i=i: flow_symbols(GRID, t, 0.5)[i])
    for i in range(2):
        rows.append(lambda t, i=i: normalized_velocity_symbols(GRID, t, 0.5)[i])
    for symbol_at in rows:
        coarse = _mode_ode_residual(symbol_at, 2e-3)
        fine = _mode_ode_residual(symbol_at, 1e-3)
        assert fine > 0.0
        ratio = coarse / fine
        assert 3.2 <= ratio <= 4.8

    bracket = GRID.bracket_k
    for t in (0.25, 1.0, 3.0):
        envelope = poisson_symbol(GRID, 2.0 * 0.5 * t)
        damped = flow_symbols(GRID, t, 0.5)
        normalized = normalized_velocity_symbols(GRID, t, 0.5)
        plain_pos = undamped_symbols(GRID, t, 0.5)
        plain_norm = undamped_normalized_velocity_symbols(GRID, t, 0.5)
        # position rows, normalized velocity rows, and the raw velocity
        # rows recovered from the normalized ones by one bracket factor
        checks = [
            (damped[0], plain_pos[0]),
            (damped[1], plain_pos[1]),
            (normalized[0], plain_norm[0]),
            (normalized[1], plain_norm[1]),
            (damped[2], bracket * plain_norm[0]),
            (damped[3], bracket * plain_norm[1]),
        ]
        for d, u in checks:
            assert float(np.max(np.abs(d - envelope * u))) <= 1e-12


# ---------------------------------------------------------------------------
# criterion 2: fractional smoothing rates of the half-wave heat kernel
# ---------------------------------------------------------------------------


def test_criterion_02_smoothing_rate_slopes():
    probe = rate_probe_field(GRID)
    times = np.geomspace(0.5, 4.0, 9)
    cases = [
        (1.0, 2.0, 2.0, 0.05),
        (0.0, 2.0, math.inf, 0.07),
        (1.0, 2.0, math.inf, 0.07),
    ]
    for alpha, p, q, tol in cases:
        fit = schauder_rate_fit(probe, alpha, p, q, times)
        assert not fit.degenerate
        assert fit.r_squared >= 0.99
        rel = abs(fit.slope - fit.reference_slope) / abs(fit.reference_slope)
        assert rel <= tol


# ---------------------------------------------------------------------------
# criterion 3: randomization is real, unbiased, and subgaussian
# ---------------------------------------------------------------------------


def test_criterion_03_randomization_identities():
    base = rough_pair(GRID, seed=7, normalize=0.0)
    c0, c1 = (np.asarray(arr) for arr in randomized_coefficient_arrays(
        base, draw_coefficients("ones", 0)))

    # the all-ones draw reproduces the input exactly
    from vnlw.multipliers import forward_transform
    ref0 = forward_transform(base.position).coeffs
    ref1 = forward_transform(base.velocity).coeffs
    scale = max(float(np.max(np.abs(ref0))), float(np.max(np.abs(ref1))))
    assert float(np.max(np.abs(c0 - ref0))) <= 1e-12 * scale
    assert float(np.max(np.abs(c1 - ref1))) <= 1e-12 * scale

    # every draw synthesizes a real field (100 seeds, both coefficient kinds)
    worst = 0.0
    for seed in range(100):
        kind = "gaussian" if seed % 2 == 0 else "bernoulli"
        a0, a1 = randomized_coefficient_arrays(base, draw_coefficients(kind, seed))
        for arr in (a0, a1):
            samples = np.fft.ifft2(arr) * arr.size
            denom = max(1.0, float(np.max(np.abs(samples.real))))
            worst = max(worst, float(np.max(np.abs(samples.imag))) / denom)
    assert worst <= 1e-12

    # mean squared L^2 mass equals the windowed decomposition mass
    target = decomposition_norm_sq(base.position, 0.0)
    values = np.empty(TAIL_ENSEMBLE)
    for i in range(TAIL_ENSEMBLE):
        a0, _ = randomized_coefficient_arrays(base, draw_coefficients("gaussian", 5000 + i))
        values[i] = spectral_sobolev(GRID, a0, 0.0) ** 2
    se = float(values.std(ddof=1) / math.sqrt(len(values)))
    assert abs(float(values.mean()) - target) <= 3.0 * se

    # second-moment identity for a finite coefficient sum
    amps = {}
    for n1 in range(-4, 5):
        for n2 in range(-4, 5):
            amps[(n1, n2)] = (1.0 + 0.5j * n2) / (1.0 + n1 * n1 + n2 * n2)
    report = verify_subgaussian_moment(amps, 2, "gaussian", TAIL_ENSEMBLE, seed=9)
    gap = abs(report.second_moment_mean - report.coefficient_norm**2)
    assert gap <= 3.0 * report.second_moment_se


# ---------------------------------------------------------------------------
# criterion 4: the unforced energy decays at the predicted rate
# ---------------------------------------------------------------------------


def test_criterion_04_energy_monotone_and_dissipation_rate():
    pair = StatePair(gaussian_bump(GRID, amplitude=0.5, width=3.0), zero_field(GRID))
    reports = {}
    for dt in (1.0 / 64.0, 1.0 / 128.0):
        traj = evolve(pair, 0.5, SolverParams(dt=dt, rule="midpoint"))
        reports[dt] = dissipation_check(traj)
    record = energy_record(evolve(pair, 0.5, SolverParams(dt=1.0 / 128.0)))
    initial = record.total[0]
    assert initial > 0.0
    assert reports[1.0 / 128.0].max_energy_increase <= 1e-12 * initial
    ratio = reports[1.0 / 64.0].max_discrepancy / reports[1.0 / 128.0].max_discrepancy
    assert 3.2 <= ratio <= 4.8


# ---------------------------------------------------------------------------
# criterion 5: the local fixed-point iteration contracts onto the march
# ---------------------------------------------------------------------------


def test_criterion_05_picard_contraction_matches_march():
    raw = gaussian_bump(GRID, amplitude=1.0, width=2.0)
    norm = pair_norm(StatePair(raw, zero_field(GRID)), S0)
    data = StatePair(RealField(GRID, raw.samples / norm), zero_field(GRID))
    assert pair_norm(data, S0) <= 1.0 + 1e-12

    params = SolverParams(dt=1.0 / 256.0, rule="trapezoid",
                          picard_tol=0.0, picard_max_iter=24)
    result = picard_solve_local(data, None, 0.05, params)
    assert not result.contraction_failed
    assert result.converged
    distances = result.distances
    assert len(distances) >= 4
    for previous, current in zip(distances, distances[1:]):
        if previous > 0.0:
            assert current / previous <= 0.5

    march = evolve(data, 0.05, params)
    gap = _sup_trajectory_distance(result.trajectory, march, params.s0)
    assert gap <= 10.0 * SolverParams().picard_tol


# ---------------------------------------------------------------------------
# criterion 6: spectral truncation error decreases with the cutoff
# ---------------------------------------------------------------------------


def test_criterion_06_truncation_error_decreases():
    from vnlw.wiener import randomize_pair

    params = SolverParams(dt=1.0 / 64.0, rule="midpoint")
    nyquist = GRID.nyquist
    assert nyquist == pytest.approx(8.0 * math.pi)
    for seed in (3, 4, 5):
        base = rough_pair(GRID, seed=seed, normalize=S0)
        drawn = randomize_pair(base, draw_coefficients("gaussian", seed + 100))
        full = evolve_full(drawn, 0.25, params)
        distances = []
        for cutoff in (nyquist / 8.0, nyquist / 4.0, nyquist / 2.0):
            truncated = evolve_truncated(drawn, cutoff, 0.25, params)
            distances.append(_sup_trajectory_distance(full, truncated, S0))
        assert distances[0] > distances[1] > distances[2] > 0.0


# ---------------------------------------------------------------------------
# criteria 7 and 8: subgaussian tails of the randomized linear flow
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def tail_batches():
    """Paired-seed ensembles of mixed-norm values for horizons 0.5 and 0.25."""
    data = DataConfig(profile="rough", decay_position=2.0, decay_velocity=1.1,
                      profile_seed=12, normalize=True, sobolev_index=0.0)
    batches = {}
    for horizon in (0.5, 0.25):
        values = np.empty(TAIL_ENSEMBLE)
        for i in range(TAIL_ENSEMBLE):
            values[i] = linear_norm_value(
                i, split_seed(TAIL_MASTER_SEED, i), n=GRID.n, length=GRID.length,
                data=data, kind="gaussian", horizon=horizon, samples=17,
                q=TAIL_Q, r=TAIL_R, mu=0.5)
        batches[horizon] = values
    return batches


def test_criterion_07_tail_curvature_fits(tail_batches):
    bands = {}
    for horizon, values in tail_batches.items():
        scale = horizon ** (2.0 / TAIL_Q)
        fit = tail_fit(values, default_lambda_grid(values, 25), scale)
        assert not fit.insufficient_tail
        assert fit.c > 0.0
        assert fit.r_squared >= 0.95
        assert fit.n_fit >= 10
        bands[horizon] = fit.c_band()
    low = max(band[0] for band in bands.values())
    high = min(band[1] for band in bands.values())
    assert low <= high, f"rescaled curvature bands {bands} do not overlap"


def test_criterion_08_exceedance_shrinks_with_horizon(tail_batches):
    full, half = tail_batches[0.5], tail_batches[0.25]
    threshold = float(np.quantile(full, 0.8))
    p_full = float(np.mean(full > threshold))
    p_half = float(np.mean(half > threshold))
    assert 0.0 < p_full < 1.0
    n = float(len(full))
    slack = 2.0 * (math.sqrt(p_full * (1.0 - p_full) / n)
                   + math.sqrt(max(p_half * (1.0 - p_half), 1.0 / n) / n))
    assert p_half <= p_full + slack
    # seeds are paired, so exceedance events nest path by path
    assert not np.any((half > threshold) & ~(full > threshold))
    assert p_half <= p_full


# ---------------------------------------------------------------------------
# criterion 9: the energy budget closes at second order
# ---------------------------------------------------------------------------


def test_criterion_09_energy_budget_halving_and_gronwall():
    from vnlw.wiener import randomize_pair

    for seed in (11, 12, 13):
        base = rough_pair(GRID, decay_position=0.9, decay_velocity=-0.1,
                          seed=seed, normalize=-0.1)
        pair = StatePair(RealField(GRID, base.position.samples * 50.0),
                         RealField(GRID, base.velocity.samples * 50.0))
        drawn = randomize_pair(pair, draw_coefficients("gaussian", seed))
        residuals, constants = {}, {}
        for dt in (1.0 / 128.0, 1.0 / 256.0):
            traj = evolve_full(drawn, 0.25, SolverParams(dt=dt, rule="midpoint"))
            budget = energy_increment_decomposition(traj, 0.0, 0.25)
            residuals[dt] = budget.residual
            record = energy_record(traj)
            size = a_quantity(traj.linear, 0.0, 0.25)
            report = gronwall_check(record, size, 0.0, 0.25)
            assert math.isfinite(report.constant) and report.constant > 0.0
            assert report.envelope_holds
            constants[dt] = report.constant
        ratio = residuals[1.0 / 128.0] / residuals[1.0 / 256.0]
        assert 3.2 <= ratio <= 4.8
        coarse, fine = constants[1.0 / 128.0], constants[1.0 / 256.0]
        assert abs(fine - coarse) <= 0.20 * abs(coarse)


# ---------------------------------------------------------------------------
# criterion 10: exponent arithmetic is exact
# ---------------------------------------------------------------------------


def test_criterion_10_exact_exponent_arithmetic():
    assert critical_exponent(2, 5) == Fraction(1, 2)
    assert scaling_regularity(5, 10, 2) == Fraction(3, 5)
    report = admissibility(Fraction(26, 5), 10, Fraction(1, 2))
    assert report.sigma_admissible is True
    assert admissibility(5.2, 10.0, 0.5).sigma_admissible is True


# ---------------------------------------------------------------------------
# criterion 11: reruns are byte-identical and worker-count independent
# ---------------------------------------------------------------------------


def test_criterion_11_deterministic_reruns_and_parallel_match(tmp_path, monkeypatch):
    text = "\n".join([
        "grid.n_points = 64",
        "grid.side_length = 16.0",
        "solver.dt = 0.03125",
        "experiment.kind = mc-tail",
        "experiment.horizon = 0.25",
        "data.profile = rough",
        "randomization.kind = gaussian",
        "randomization.seed = 4",
        "randomization.ensemble = 600",
        "",
    ])
    config = parse_config(text)

    def run(name: str, workers: str) -> dict[str, bytes]:
        out = tmp_path / name
        monkeypatch.setenv("VNLW_WORKERS", workers)
        run_experiment(config.with_overrides(out=str(out)))
        blobs = {}
        for path in sorted(out.rglob("*.csv")):
            blobs[str(path.relative_to(out))] = path.read_bytes()
        return blobs

    first = run("a", "1")
    second = run("b", "1")
    parallel = run("c", "3")
    assert first
    assert second == first
    assert parallel == first
