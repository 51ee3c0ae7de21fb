"""The seven studies behind the command-line subcommands.

Each study reads a validated RunConfig, runs the relevant operations,
and writes delimited data, a key=value summary, and a rendered figure
into the output directory.  A manifest indexing every artifact is
written last; if a study dies partway the manifest is still written,
marked incomplete.  All randomness is derived from the master seed by
counter splitting, so reruns are byte-identical on the delimited
outputs and parallel ensembles match serial ones exactly.
"""

from __future__ import annotations

import math
import time
from functools import lru_cache, partial
from pathlib import Path

import numpy as np

from .config import DataConfig, RunConfig, config_digest, emit_config
from .diagnostics import (
    a_quantity,
    dissipation_check,
    energy,
    energy_increment_decomposition,
    energy_record,
    gronwall_check,
    norm_inflation_probe,
    randomized_strichartz_event,
    schauder_rate_fit,
    tail_fit,
)
from .ensemble import run_replicas
from .grid import Grid, RealField, SpectralField, StatePair, inverse_transform, \
    read_snapshot, write_snapshot
from .manifest import OutputManifest, build_manifest, write_manifest
from .norms import lebesgue_norm, pair_norm
from .profiles import (
    constant_field,
    gaussian_bump,
    packet_pair,
    rate_probe_field,
    rough_pair,
    single_mode,
    zero_field,
    zero_pair,
)
from .propagators import flow_symbols
from .reporting import line_figure, write_csv, write_summary
from .solver import (
    BlowUpError,
    LinearForcing,
    SolverParams,
    Trajectory,
    evolve,
    evolve_full,
    evolve_truncated,
    picard_solve_local,
)
from .version import __version__
from .wiener import draw_coefficients, randomize_pair, randomized_coefficient_arrays

__all__ = [
    "build_pair",
    "initial_pair",
    "solution_states",
    "trajectory_distance",
    "linear_norm_value",
    "default_lambda_grid",
    "run_experiment",
]

_TAIL_TIME_SAMPLES = 17


def build_pair(grid: Grid, data: DataConfig) -> StatePair:
    """Materialize the data spec on a grid."""
    width = None if data.width == 0.0 else data.width
    if data.profile == "zero":
        return zero_pair(grid)
    if data.profile == "constant":
        return StatePair(constant_field(grid, data.value), zero_field(grid))
    if data.profile == "single_mode":
        position = single_mode(grid, (data.frequency, 0), data.amplitude, data.phase)
        return StatePair(position, zero_field(grid))
    if data.profile == "bump":
        bump = gaussian_bump(grid, width, data.amplitude)
        return StatePair(bump, zero_field(grid))
    if data.profile == "packet":
        return packet_pair(grid, data.frequency, data.amplitude, width)
    if data.profile == "rough":
        target = data.sobolev_index if data.normalize else None
        return rough_pair(grid, data.decay_position, data.decay_velocity,
                          data.profile_seed, target)
    if data.profile == "smoothing_probe":
        return StatePair(rate_probe_field(grid), zero_field(grid))
    if data.profile == "snapshot":
        position, _ = read_snapshot(data.position_file)
        if position.grid != grid:
            raise ValueError(
                f"snapshot grid {position.grid.n}x{position.grid.n} "
                f"(L={position.grid.length}) does not match the configured grid"
            )
        if data.velocity_file:
            velocity, _ = read_snapshot(data.velocity_file)
            if velocity.grid != grid:
                raise ValueError("velocity snapshot grid does not match the configured grid")
        else:
            velocity = zero_field(grid)
        return StatePair(position, velocity)
    raise ValueError(f"unknown data profile {data.profile!r}")


def initial_pair(config: RunConfig) -> StatePair:
    return build_pair(Grid(config.grid.n_points, config.grid.side_length), config.data)


def solution_states(traj: Trajectory) -> list[StatePair]:
    """Snapshots of the full solution u = z + v (or v itself when z = 0)."""
    if traj.linear is None:
        return list(traj.states)
    grid = traj.grid
    states = []
    for t, v in zip(traj.times, traj.states):
        z = traj.linear.state_at(t)
        states.append(StatePair(
            RealField(grid, z.position.samples + v.position.samples),
            RealField(grid, z.velocity.samples + v.velocity.samples),
        ))
    return states


def trajectory_distance(first: Trajectory, second: Trajectory, s: float) -> float:
    """Sup over shared snapshot times of the pair-norm distance of u = z + v."""
    if len(first.times) != len(second.times) or any(
            abs(a - b) > 1e-9 * max(1.0, abs(a))
            for a, b in zip(first.times, second.times)):
        raise ValueError("trajectories were not sampled at the same times")
    grid = first.grid
    worst = 0.0
    for a, b in zip(solution_states(first), solution_states(second)):
        diff = StatePair(
            RealField(grid, a.position.samples - b.position.samples),
            RealField(grid, a.velocity.samples - b.velocity.samples),
        )
        worst = max(worst, pair_norm(diff, s))
    return worst


@lru_cache(maxsize=4)
def _stacked_flow(grid: Grid, times: tuple[float, ...], mu: float):
    pairs = [flow_symbols(grid, t, mu) for t in times]
    return (np.stack([s[0] for s in pairs]), np.stack([s[1] for s in pairs]))


def linear_norm_value(index: int, seed: int, *, n: int, length: float,
                      data: DataConfig, kind: str, horizon: float, samples: int,
                      q: float, r: float, mu: float) -> float:
    """Mixed L^q_t L^r_x norm of the linear flow of one randomized draw.

    This is the per-replica unit of the tail study: deterministic in
    (data, kind, seed), cheap enough for thousands of draws because the
    flow symbols over the shared time grid are cached per process.
    """
    grid = Grid(n, length)
    base = build_pair(grid, data)
    a0, a1 = randomized_coefficient_arrays(base, draw_coefficients(kind, seed))
    times = np.linspace(0.0, horizon, samples)
    pos, vel = _stacked_flow(grid, tuple(float(t) for t in times), mu)
    phi = np.empty(samples)
    for i in range(samples):
        z = inverse_transform(SpectralField(grid, pos[i] * a0 + vel[i] * a1))
        phi[i] = lebesgue_norm(z, r) ** q
    return float(np.trapezoid(phi, times) ** (1.0 / q))


def default_lambda_grid(values, count: int) -> np.ndarray:
    """Threshold grid even in lambda^2 from the median to the deep tail."""
    v = np.sort(np.asarray([float(x) for x in values]))
    if v.size < 4:
        raise ValueError("need at least 4 norm values to place a threshold grid")
    lo = float(np.quantile(v, 0.5))
    hi = float(np.quantile(v, 1.0 - 2.0 / v.size))
    if hi <= lo:
        hi = float(v[-1])
    if hi <= lo:
        hi = lo * 1.5 + 1e-12
    return np.sqrt(np.linspace(lo * lo, hi * hi, count))


def _randomized_source(config: RunConfig, pair: StatePair):
    kind = config.randomization.kind
    if kind == "none":
        return pair
    return randomize_pair(pair, draw_coefficients(kind, config.randomization.seed))


def _trajectory_rows(times, states, params: SolverParams):
    rows = []
    for t, state in zip(times, states):
        rows.append((
            t,
            energy(state, params.p),
            pair_norm(state, params.s0),
            lebesgue_norm(state.position, 2.0),
            float(np.max(np.abs(state.position.samples))),
        ))
    return rows


def _run_solve(config: RunConfig, out: Path) -> None:
    pair = initial_pair(config)
    params = config.solver
    source = _randomized_source(config, pair)
    if config.randomization.kind == "none":
        traj = evolve(pair, config.experiment.horizon, params)
    else:
        traj = evolve_full(source, config.experiment.horizon, params)
    states = solution_states(traj)
    rows = _trajectory_rows(traj.times, states, params)
    write_csv(out / "trajectory.csv",
              ["t", "energy", "pair_norm", "position_l2", "position_sup"], rows)
    write_snapshot(out / "final_position.snap", states[-1].position)
    write_snapshot(out / "final_velocity.snap", states[-1].velocity)
    columns = list(zip(*rows))
    line_figure(out / "trajectory.png", columns[0],
                {"energy": columns[1], "pair norm": columns[2]},
                "t", "value", "solution trajectory")
    write_summary(out / "solve.txt", {
        "final_time": traj.times[-1],
        "snapshots": len(traj.times),
        "final_energy": rows[-1][1],
        "final_pair_norm": rows[-1][2],
    })


def _energy_csv_rows(record) -> list[tuple]:
    return list(zip(record.times, record.total, record.gradient, record.kinetic,
                    record.potential, record.dissipation))


def _run_energy(config: RunConfig, out: Path) -> None:
    pair = initial_pair(config)
    params = config.solver
    source = _randomized_source(config, pair)
    if config.randomization.kind == "none":
        traj = evolve(pair, config.experiment.horizon, params)
    else:
        traj = evolve_full(source, config.experiment.horizon, params)
    record = energy_record(traj)
    write_csv(out / "energy.csv",
              ["t", "E", "gradient", "kinetic", "potential", "dissipation"],
              _energy_csv_rows(record))
    summary: dict[str, object] = {
        "initial_energy": record.total[0],
        "final_energy": record.total[-1],
        "max_energy_increase": float(np.max(np.diff(record.total), initial=0.0)),
    }
    if traj.linear is None:
        report = dissipation_check(traj)
        summary["max_dissipation_discrepancy"] = report.max_discrepancy
        summary["monotone_up_to"] = report.max_energy_increase
    else:
        times = np.asarray(traj.times)
        t0 = float(times[int(np.argmin(np.abs(times - config.experiment.start)))])
        t1 = float(times[-1])
        dec = energy_increment_decomposition(traj, t0, t1)
        size = a_quantity(traj.linear, t0, t1, config.experiment.s1)
        bound = gronwall_check(record, size, t0, t1)
        summary.update({
            "window_start": dec.t_start,
            "window_end": dec.t_end,
            "work_linear": dec.work_linear,
            "work_cross": dec.work_cross,
            "boundary_start": dec.boundary_start,
            "boundary_end": dec.boundary_end,
            "bulk": dec.bulk,
            "residual": dec.residual,
            "energy_increment": dec.energy_increment,
            "bound_gap": dec.bound_gap,
            "a_total": size.total,
            "gronwall_constant": bound.constant,
            "envelope_holds": bound.envelope_holds,
        })
    write_summary(out / "energy.txt", summary)
    line_figure(out / "energy.png", record.times,
                {"total": record.total, "gradient": record.gradient,
                 "kinetic": record.kinetic, "potential": record.potential},
                "t", "energy", "energy budget")


_SCHAUDER_TRIPLES = ((1.0, 2.0, math.inf), (0.0, 2.0, math.inf), (1.0, 2.0, 2.0))


def _run_schauder(config: RunConfig, out: Path) -> None:
    grid = Grid(config.grid.n_points, config.grid.side_length)
    field = build_pair(grid, config.data).position
    times = config.experiment.times
    if not times:
        hi = min(4.0, grid.length / 8.0)
        times = tuple(np.geomspace(hi / 8.0, hi, 9))
    rows = []
    summary: dict[str, object] = {}
    series: dict[str, tuple] = {}
    for alpha, p_in, q_out in _SCHAUDER_TRIPLES:
        fit = schauder_rate_fit(field, alpha, p_in, q_out, times)
        label = f"alpha{alpha:g}_p{p_in:g}_q{q_out:g}"
        rows.extend((alpha, p_in, q_out, t, ratio)
                    for t, ratio in zip(fit.times, fit.ratios))
        err = abs(fit.slope - fit.reference_slope) / abs(fit.reference_slope)
        summary[f"slope_{label}"] = fit.slope
        summary[f"reference_{label}"] = fit.reference_slope
        summary[f"slope_error_percent_{label}"] = 100.0 * err
        summary[f"r_squared_{label}"] = fit.r_squared
        summary[f"degenerate_{label}"] = fit.degenerate
        series[label] = fit.ratios
    write_csv(out / "schauder.csv", ["alpha", "p", "q", "t", "ratio"], rows)
    write_summary(out / "schauder_fit.txt", summary)
    line_figure(out / "schauder.png", times, series, "t", "norm ratio",
                "smoothing decay rates", logx=True, logy=True)


def _run_tail(config: RunConfig, out: Path) -> None:
    rand = config.randomization
    if rand.kind == "none":
        raise ValueError(
            "the tail study needs randomized data; set randomization.kind "
            "to gaussian, bernoulli, or ones"
        )
    exp = config.experiment
    pair = initial_pair(config)
    reference = pair_norm(pair, exp.alpha)
    scale = exp.horizon ** (2.0 / exp.q - 2.0 * exp.alpha) * reference ** 2
    task = partial(
        linear_norm_value,
        n=config.grid.n_points,
        length=config.grid.side_length,
        data=config.data,
        kind=rand.kind,
        horizon=exp.horizon,
        samples=_TAIL_TIME_SAMPLES,
        q=exp.q,
        r=exp.r,
        mu=config.solver.mu,
    )
    outcomes = run_replicas(task, rand.ensemble, rand.seed)
    values = [float(o.value) for o in outcomes if o.ok]
    write_csv(out / "norms.csv", ["replica", "seed", "ok", "value"],
              [(o.index, o.seed, o.ok, float(o.value) if o.ok else math.nan)
               for o in outcomes])
    lam = np.asarray(exp.lambda_grid) if exp.lambda_grid \
        else default_lambda_grid(values, exp.lambda_count)
    fit = tail_fit(values, lam, scale)
    event = randomized_strichartz_event(values, exp.threshold)
    write_csv(out / "tail.csv", ["lambda", "p_hat", "lo", "hi"],
              list(zip(fit.lam, fit.p_hat, fit.wilson_low, fit.wilson_high)))
    low, high = fit.c_band()
    write_summary(out / "tail_fit.txt", {
        "ensemble_requested": rand.ensemble,
        "ensemble_used": len(values),
        "failed_replicas": rand.ensemble - len(values),
        "scale": fit.scale,
        "c": fit.c,
        "c_se": fit.c_se,
        "c_low": low,
        "c_high": high,
        "log_c0": fit.log_c0,
        "r_squared": fit.r_squared,
        "n_fit": fit.n_fit,
        "insufficient_tail": fit.insufficient_tail,
        "threshold": event.threshold,
        "event_probability": event.probability,
        "event_complement": event.complement,
        "event_se": event.standard_error,
    })
    x = np.asarray(fit.lam) ** 2 / fit.scale
    fitted = np.exp(fit.log_c0 - fit.c * x)
    line_figure(out / "tail.png", x,
                {"empirical": fit.p_hat, "fit": fitted},
                "lambda^2 / scale", "exceedance probability",
                "norm tail", logy=True)


def _run_inflation(config: RunConfig, out: Path) -> None:
    grid = Grid(config.grid.n_points, config.grid.side_length)
    data = config.data
    exp = config.experiment
    carriers = [data.frequency * 2 ** j for j in range(exp.carriers)]
    if carriers[-1] >= grid.n // 2:
        raise ValueError(
            f"top carrier index {carriers[-1]} does not fit below the "
            f"Nyquist index {grid.n // 2}; lower data.frequency or "
            f"experiment.carriers"
        )
    width = None if data.width == 0.0 else data.width
    members = [(f"carrier_{m}", packet_pair(grid, m, data.amplitude, width))
               for m in carriers]
    rows = norm_inflation_probe(members, data.sobolev_index, exp.horizon,
                                config.solver)
    write_csv(out / "inflation.csv",
              ["label", "initial_norm", "peak_norm", "peak_time",
               "amplification", "ceiling_hit"],
              [(r.label, r.initial_norm, r.peak_norm, r.peak_time,
                r.amplification, r.ceiling_hit) for r in rows])
    amps = [r.amplification for r in rows]
    write_summary(out / "inflation.txt", {
        "sobolev_index": data.sobolev_index,
        "probe_time": exp.horizon,
        "max_amplification": max(amps),
        "amplification_increasing": all(b >= a for a, b in zip(amps, amps[1:])),
        "any_ceiling_hit": any(r.ceiling_hit for r in rows),
    })
    line_figure(out / "inflation.png", carriers, {"amplification": amps},
                "carrier index", "peak/initial pair norm",
                "norm amplification by carrier", logx=True)


def _truncation_values(index: int, seed: int, *, n: int, length: float,
                       data: DataConfig, kind: str, levels: tuple[float, ...],
                       horizon: float, params: SolverParams) -> tuple:
    grid = Grid(n, length)
    base = build_pair(grid, data)
    source = base if kind == "none" else randomize_pair(base, draw_coefficients(kind, seed))
    full = evolve_full(source, horizon, params)
    out = []
    for level in levels:
        truncated = evolve_truncated(source, level, horizon, params)
        out.append((level, trajectory_distance(full, truncated, params.s0)))
    return tuple(out)


def _run_truncation(config: RunConfig, out: Path) -> None:
    grid = Grid(config.grid.n_points, config.grid.side_length)
    exp = config.experiment
    levels = exp.truncation_levels
    if not levels:
        levels = tuple(grid.nyquist * f for f in (0.125, 0.25, 0.5))
    task = partial(
        _truncation_values,
        n=config.grid.n_points,
        length=config.grid.side_length,
        data=config.data,
        kind=config.randomization.kind,
        levels=tuple(levels),
        horizon=exp.horizon,
        params=config.solver,
    )
    outcomes = run_replicas(task, config.randomization.ensemble,
                            config.randomization.seed)
    rows = []
    summary: dict[str, object] = {"levels": ",".join(repr(float(v)) for v in levels)}
    series: dict[str, list] = {}
    all_monotone = True
    for outcome in outcomes:
        if not outcome.ok:
            summary[f"replica_{outcome.index}_failed"] = outcome.error
            all_monotone = False
            continue
        distances = [d for _, d in outcome.value]
        rows.extend((outcome.index, outcome.seed, level, dist)
                    for level, dist in outcome.value)
        monotone = all(b < a for a, b in zip(distances, distances[1:]))
        summary[f"monotone_replica_{outcome.index}"] = monotone
        all_monotone = all_monotone and monotone
        series[f"replica {outcome.index}"] = distances
    summary["all_monotone"] = all_monotone
    write_csv(out / "truncation.csv", ["replica", "seed", "level", "distance"], rows)
    write_summary(out / "truncation.txt", summary)
    if series:
        line_figure(out / "truncation.png", list(levels), series,
                    "truncation frequency", "sup-in-time pair distance",
                    "spectral truncation error", logx=True, logy=True)


def _run_picard(config: RunConfig, out: Path) -> None:
    grid = Grid(config.grid.n_points, config.grid.side_length)
    pair = initial_pair(config)
    params = config.solver
    source = _randomized_source(config, pair)
    forcing = LinearForcing.from_pair(source, params.mu)
    result = picard_solve_local(zero_pair(grid), forcing,
                                config.experiment.horizon, params)
    march = evolve_full(source, config.experiment.horizon, params)
    fixed = result.trajectory.states[-1]
    final = march.states[-1]
    gap = StatePair(
        RealField(grid, fixed.position.samples - final.position.samples),
        RealField(grid, fixed.velocity.samples - final.velocity.samples),
    )
    march_distance = pair_norm(gap, params.s0)
    rows = []
    for i, dist in enumerate(result.distances):
        ratio = math.nan if i == 0 else dist / result.distances[i - 1] \
            if result.distances[i - 1] > 0 else math.nan
        rows.append((i + 1, dist, ratio))
    write_csv(out / "picard.csv", ["iteration", "distance", "ratio"], rows)
    write_summary(out / "picard.txt", {
        "converged": result.converged,
        "contraction_failed": result.contraction_failed,
        "iterations": result.iterations,
        "final_distance": result.distances[-1] if result.distances else math.nan,
        "tolerance": params.picard_tol,
        "rule": params.rule,
        "march_distance_at_final_time": march_distance,
    })
    if result.distances:
        line_figure(out / "picard.png", [row[0] for row in rows],
                    {"iterate distance": [row[1] for row in rows]},
                    "iteration", "distance", "fixed-point contraction", logy=True)


_RUNNERS = {
    "solve": _run_solve,
    "energy": _run_energy,
    "schauder": _run_schauder,
    "mc-tail": _run_tail,
    "norm-inflation": _run_inflation,
    "truncation": _run_truncation,
    "picard": _run_picard,
}


def run_experiment(config: RunConfig) -> OutputManifest:
    """Run the configured study and index everything it wrote.

    The canonical config text is itself an artifact, so a run directory
    is self-describing.  On failure the manifest is written with
    ``complete = false`` before the error propagates.
    """
    kind = config.experiment.kind
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    (out / "config.txt").write_text(emit_config(config), encoding="ascii")
    digest = config_digest(config)
    seed = config.randomization.seed

    def finalize(complete: bool) -> OutputManifest:
        manifest = build_manifest(digest, __version__, seed,
                                  time.perf_counter() - started, out,
                                  complete=complete)
        write_manifest(manifest, out)
        return manifest

    try:
        _RUNNERS[kind](config, out)
    except BaseException:
        finalize(complete=False)
        raise
    return finalize(complete=True)
