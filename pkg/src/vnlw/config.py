"""Run configuration: flat dotted-key text, strict validation, canonical form.

The on-disk format is ``section.key = value`` lines with ``#`` comments.
Parsing validates every key and reports the complete list of problems
rather than stopping at the first.  Unknown keys are rejected so typos
fail loudly.  ``emit_config`` writes a canonical rendering that parses
back to an equal configuration, which is what run manifests digest.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, replace

from .solver import SolverParams

__all__ = [
    "ConfigError",
    "GridConfig",
    "DataConfig",
    "RandomizationConfig",
    "ExperimentConfig",
    "RunConfig",
    "parse_config",
    "emit_config",
    "config_digest",
    "EXPERIMENT_KINDS",
    "DATA_PROFILES",
]

EXPERIMENT_KINDS = (
    "solve",
    "mc-tail",
    "energy",
    "schauder",
    "norm-inflation",
    "truncation",
    "picard",
)

DATA_PROFILES = (
    "zero",
    "constant",
    "single_mode",
    "bump",
    "packet",
    "rough",
    "smoothing_probe",
    "snapshot",
)

_DRAW_KINDS = ("none", "gaussian", "bernoulli", "ones")


class ConfigError(ValueError):
    """Invalid configuration text; ``errors`` lists every problem found."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class GridConfig:
    n_points: int = 256
    side_length: float = 32.0


@dataclass(frozen=True)
class DataConfig:
    profile: str = "rough"
    amplitude: float = 1.0
    frequency: int = 1
    width: float = 0.0
    phase: float = 0.0
    value: float = 0.0
    decay_position: float = 2.0
    decay_velocity: float = 1.1
    profile_seed: int = 12
    normalize: bool = True
    sobolev_index: float = 0.0
    position_file: str = ""
    velocity_file: str = ""


@dataclass(frozen=True)
class RandomizationConfig:
    kind: str = "none"
    seed: int = 0
    ensemble: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "solve"
    horizon: float = 0.5
    start: float = 0.0
    threshold: float = 1.0
    q: float = 5.2
    r: float = 10.0
    alpha: float = 0.0
    s1: float = 0.55
    lambda_count: int = 25
    lambda_grid: tuple[float, ...] = ()
    times: tuple[float, ...] = ()
    truncation_levels: tuple[float, ...] = ()
    carriers: int = 3


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = GridConfig()
    data: DataConfig = DataConfig()
    randomization: RandomizationConfig = RandomizationConfig()
    solver: SolverParams = SolverParams()
    experiment: ExperimentConfig = ExperimentConfig()
    output_dir: str = "out"

    def with_overrides(self, seed: int | None = None, replicas: int | None = None,
                       out: str | None = None, kind: str | None = None) -> "RunConfig":
        cfg = self
        rand = cfg.randomization
        if seed is not None:
            rand = replace(rand, seed=int(seed))
        if replicas is not None:
            rand = replace(rand, ensemble=int(replicas))
        if rand is not cfg.randomization:
            cfg = replace(cfg, randomization=rand)
        if out is not None:
            cfg = replace(cfg, output_dir=out)
        if kind is not None and kind != cfg.experiment.kind:
            cfg = replace(cfg, experiment=replace(cfg.experiment, kind=kind))
        return cfg


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_u64(text: str) -> int:
    value = int(text, 10)
    if not 0 <= value < 2 ** 64:
        raise ValueError("outside the unsigned 64-bit range")
    return value


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise ValueError("expected true or false")


def _parse_str(text: str) -> str:
    return text.strip()


def _parse_floats(text: str) -> tuple[float, ...]:
    body = text.strip()
    if not body:
        return ()
    return tuple(_parse_float(part) for part in body.split(","))


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# key -> (parser, default); declaration order is the canonical emission order.
_DEFAULTS = RunConfig()
_SCHEMA: dict[str, tuple] = {
    "grid.n_points": (_parse_int, _DEFAULTS.grid.n_points),
    "grid.side_length": (_parse_float, _DEFAULTS.grid.side_length),
    "data.profile": (_parse_str, _DEFAULTS.data.profile),
    "data.amplitude": (_parse_float, _DEFAULTS.data.amplitude),
    "data.frequency": (_parse_int, _DEFAULTS.data.frequency),
    "data.width": (_parse_float, _DEFAULTS.data.width),
    "data.phase": (_parse_float, _DEFAULTS.data.phase),
    "data.value": (_parse_float, _DEFAULTS.data.value),
    "data.decay_position": (_parse_float, _DEFAULTS.data.decay_position),
    "data.decay_velocity": (_parse_float, _DEFAULTS.data.decay_velocity),
    "data.profile_seed": (_parse_u64, _DEFAULTS.data.profile_seed),
    "data.normalize": (_parse_bool, _DEFAULTS.data.normalize),
    "data.sobolev_index": (_parse_float, _DEFAULTS.data.sobolev_index),
    "data.position_file": (_parse_str, _DEFAULTS.data.position_file),
    "data.velocity_file": (_parse_str, _DEFAULTS.data.velocity_file),
    "randomization.kind": (_parse_str, _DEFAULTS.randomization.kind),
    "randomization.seed": (_parse_u64, _DEFAULTS.randomization.seed),
    "randomization.ensemble": (_parse_int, _DEFAULTS.randomization.ensemble),
    "solver.p": (_parse_int, _DEFAULTS.solver.p),
    "solver.mu": (_parse_float, _DEFAULTS.solver.mu),
    "solver.dt": (_parse_float, _DEFAULTS.solver.dt),
    "solver.substeps": (_parse_int, _DEFAULTS.solver.substeps),
    "solver.padding": (_parse_int, _DEFAULTS.solver.padding),
    "solver.rule": (_parse_str, _DEFAULTS.solver.rule),
    "solver.delta": (_parse_float, _DEFAULTS.solver.delta),
    "solver.picard_tol": (_parse_float, _DEFAULTS.solver.picard_tol),
    "solver.picard_max_iter": (_parse_int, _DEFAULTS.solver.picard_max_iter),
    "solver.snapshot_every": (_parse_int, _DEFAULTS.solver.snapshot_every),
    "solver.blowup_factor": (_parse_float, _DEFAULTS.solver.blowup_factor),
    "experiment.kind": (_parse_str, _DEFAULTS.experiment.kind),
    "experiment.horizon": (_parse_float, _DEFAULTS.experiment.horizon),
    "experiment.start": (_parse_float, _DEFAULTS.experiment.start),
    "experiment.threshold": (_parse_float, _DEFAULTS.experiment.threshold),
    "experiment.q": (_parse_float, _DEFAULTS.experiment.q),
    "experiment.r": (_parse_float, _DEFAULTS.experiment.r),
    "experiment.alpha": (_parse_float, _DEFAULTS.experiment.alpha),
    "experiment.s1": (_parse_float, _DEFAULTS.experiment.s1),
    "experiment.lambda_count": (_parse_int, _DEFAULTS.experiment.lambda_count),
    "experiment.lambda_grid": (_parse_floats, _DEFAULTS.experiment.lambda_grid),
    "experiment.times": (_parse_floats, _DEFAULTS.experiment.times),
    "experiment.truncation_levels": (_parse_floats, _DEFAULTS.experiment.truncation_levels),
    "experiment.carriers": (_parse_int, _DEFAULTS.experiment.carriers),
    "output.directory": (_parse_str, _DEFAULTS.output_dir),
}


def _increasing_positive(values: tuple[float, ...]) -> bool:
    return all(v > 0 for v in values) and all(b > a for a, b in zip(values, values[1:]))


def _validate(v: dict[str, object], errors: list[str]) -> None:
    def bad(key: str, message: str) -> None:
        errors.append(f"{key}: {message} (got {_fmt(v[key])})")

    n = v["grid.n_points"]
    if n < 8 or n & (n - 1):
        bad("grid.n_points", "must be a power of two, at least 8")
    if v["grid.side_length"] <= 0:
        bad("grid.side_length", "must be positive")

    if v["data.profile"] not in DATA_PROFILES:
        bad("data.profile", f"must be one of {', '.join(DATA_PROFILES)}")
    if v["data.frequency"] < 1:
        bad("data.frequency", "must be at least 1")
    if v["data.width"] < 0:
        bad("data.width", "must be nonnegative (0 selects the profile default)")
    if v["data.profile"] == "snapshot":
        if not v["data.position_file"]:
            bad("data.position_file", "required when data.profile is snapshot")
        else:
            for key in ("data.position_file", "data.velocity_file"):
                path = v[key]
                if path and not os.path.exists(path):
                    bad(key, "file does not exist")

    if v["randomization.kind"] not in _DRAW_KINDS:
        bad("randomization.kind", f"must be one of {', '.join(_DRAW_KINDS)}")
    if v["randomization.ensemble"] < 1:
        bad("randomization.ensemble", "must be at least 1")

    p = v["solver.p"]
    if p < 3 or p % 2 == 0:
        bad("solver.p", "must be an odd integer, at least 3")
    if not 0 < v["solver.mu"] < 1:
        bad("solver.mu", "must lie strictly between 0 and 1")
    if v["solver.dt"] <= 0:
        bad("solver.dt", "must be positive")
    if v["solver.substeps"] < 1:
        bad("solver.substeps", "must be at least 1")
    if p >= 3 and v["solver.padding"] < (p + 1) // 2:
        bad("solver.padding", f"must be at least {(p + 1) // 2} to dealias power {p}")
    if v["solver.rule"] not in ("midpoint", "trapezoid"):
        bad("solver.rule", "must be midpoint or trapezoid")
    if v["solver.delta"] <= 0:
        bad("solver.delta", "must be positive")
    if v["solver.picard_tol"] < 0:
        bad("solver.picard_tol", "must be nonnegative")
    if v["solver.picard_max_iter"] < 1:
        bad("solver.picard_max_iter", "must be at least 1")
    if v["solver.snapshot_every"] < 1:
        bad("solver.snapshot_every", "must be at least 1")
    if v["solver.blowup_factor"] <= 0:
        bad("solver.blowup_factor", "must be positive")

    if v["experiment.kind"] not in EXPERIMENT_KINDS:
        bad("experiment.kind", f"must be one of {', '.join(EXPERIMENT_KINDS)}")
    if v["experiment.horizon"] <= 0:
        bad("experiment.horizon", "must be positive")
    if not 0 <= v["experiment.start"] < v["experiment.horizon"]:
        bad("experiment.start", "must lie in [0, horizon)")
    if v["experiment.threshold"] <= 0:
        bad("experiment.threshold", "must be positive")
    if v["experiment.q"] < 1:
        bad("experiment.q", "must be at least 1")
    if v["experiment.r"] < 1:
        bad("experiment.r", "must be at least 1")
    if v["experiment.alpha"] < 0:
        bad("experiment.alpha", "must be nonnegative")
    if not 0.5 < v["experiment.s1"] < 1:
        bad("experiment.s1", "must lie strictly between 0.5 and 1")
    if v["experiment.lambda_count"] < 3:
        bad("experiment.lambda_count", "must be at least 3")
    for key in ("experiment.lambda_grid", "experiment.times",
                "experiment.truncation_levels"):
        if v[key] and not _increasing_positive(v[key]):
            bad(key, "must be positive and strictly increasing")
    if v["experiment.carriers"] < 1:
        bad("experiment.carriers", "must be at least 1")

    if not v["output.directory"]:
        bad("output.directory", "must be nonempty")


def _assemble(v: dict[str, object]) -> RunConfig:
    return RunConfig(
        grid=GridConfig(v["grid.n_points"], v["grid.side_length"]),
        data=DataConfig(
            profile=v["data.profile"],
            amplitude=v["data.amplitude"],
            frequency=v["data.frequency"],
            width=v["data.width"],
            phase=v["data.phase"],
            value=v["data.value"],
            decay_position=v["data.decay_position"],
            decay_velocity=v["data.decay_velocity"],
            profile_seed=v["data.profile_seed"],
            normalize=v["data.normalize"],
            sobolev_index=v["data.sobolev_index"],
            position_file=v["data.position_file"],
            velocity_file=v["data.velocity_file"],
        ),
        randomization=RandomizationConfig(
            kind=v["randomization.kind"],
            seed=v["randomization.seed"],
            ensemble=v["randomization.ensemble"],
        ),
        solver=SolverParams(
            p=v["solver.p"],
            mu=v["solver.mu"],
            dt=v["solver.dt"],
            substeps=v["solver.substeps"],
            padding=v["solver.padding"],
            rule=v["solver.rule"],
            delta=v["solver.delta"],
            picard_tol=v["solver.picard_tol"],
            picard_max_iter=v["solver.picard_max_iter"],
            snapshot_every=v["solver.snapshot_every"],
            blowup_factor=v["solver.blowup_factor"],
        ),
        experiment=ExperimentConfig(
            kind=v["experiment.kind"],
            horizon=v["experiment.horizon"],
            start=v["experiment.start"],
            threshold=v["experiment.threshold"],
            q=v["experiment.q"],
            r=v["experiment.r"],
            alpha=v["experiment.alpha"],
            s1=v["experiment.s1"],
            lambda_count=v["experiment.lambda_count"],
            lambda_grid=v["experiment.lambda_grid"],
            times=v["experiment.times"],
            truncation_levels=v["experiment.truncation_levels"],
            carriers=v["experiment.carriers"],
        ),
        output_dir=v["output.directory"],
    )


def _flatten(config: RunConfig) -> dict[str, object]:
    g, d, r, s, e = (config.grid, config.data, config.randomization,
                     config.solver, config.experiment)
    return {
        "grid.n_points": g.n_points,
        "grid.side_length": g.side_length,
        "data.profile": d.profile,
        "data.amplitude": d.amplitude,
        "data.frequency": d.frequency,
        "data.width": d.width,
        "data.phase": d.phase,
        "data.value": d.value,
        "data.decay_position": d.decay_position,
        "data.decay_velocity": d.decay_velocity,
        "data.profile_seed": d.profile_seed,
        "data.normalize": d.normalize,
        "data.sobolev_index": d.sobolev_index,
        "data.position_file": d.position_file,
        "data.velocity_file": d.velocity_file,
        "randomization.kind": r.kind,
        "randomization.seed": r.seed,
        "randomization.ensemble": r.ensemble,
        "solver.p": s.p,
        "solver.mu": s.mu,
        "solver.dt": s.dt,
        "solver.substeps": s.substeps,
        "solver.padding": s.padding,
        "solver.rule": s.rule,
        "solver.delta": s.delta,
        "solver.picard_tol": s.picard_tol,
        "solver.picard_max_iter": s.picard_max_iter,
        "solver.snapshot_every": s.snapshot_every,
        "solver.blowup_factor": s.blowup_factor,
        "experiment.kind": e.kind,
        "experiment.horizon": e.horizon,
        "experiment.start": e.start,
        "experiment.threshold": e.threshold,
        "experiment.q": e.q,
        "experiment.r": e.r,
        "experiment.alpha": e.alpha,
        "experiment.s1": e.s1,
        "experiment.lambda_count": e.lambda_count,
        "experiment.lambda_grid": e.lambda_grid,
        "experiment.times": e.times,
        "experiment.truncation_levels": e.truncation_levels,
        "experiment.carriers": e.carriers,
        "output.directory": config.output_dir,
    }


def parse_config(text: str) -> RunConfig:
    """Parse dotted-key configuration text into a validated RunConfig.

    Raises ConfigError carrying the complete list of problems: syntax,
    unknown keys, duplicates, value parse failures, and range
    violations are all gathered in one pass.
    """
    values: dict[str, object] = {key: default for key, (_, default) in _SCHEMA.items()}
    errors: list[str] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, _, body = line.partition("=")
        key = key.strip()
        body = body.strip()
        if key not in _SCHEMA:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in seen:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        seen.add(key)
        parser, _ = _SCHEMA[key]
        try:
            values[key] = parser(body)
        except ValueError as exc:
            errors.append(f"{key}: invalid value {body!r} ({exc})")
    _validate(values, errors)
    if errors:
        raise ConfigError(errors)
    return _assemble(values)


def emit_config(config: RunConfig) -> str:
    """Render the canonical text form; parsing it back gives an equal config."""
    flat = _flatten(config)
    lines = [f"{key} = {_fmt(flat[key])}" for key in _SCHEMA]
    return "\n".join(lines) + "\n"


def config_digest(config: RunConfig) -> str:
    """Hex digest of the canonical text; identifies a run configuration."""
    return hashlib.sha256(emit_config(config).encode("ascii")).hexdigest()
