"""Seeded replica execution, serial or across processes.

Each replica receives a seed derived from the master seed and its index
by the package's 64-bit mixing chain, so results are a pure function of
(master seed, index) no matter how work is scheduled.  Outcomes are
returned in index order; a failed replica is marked rather than
aborting the ensemble, with a warning naming it.

The worker count comes from the VNLW_WORKERS environment variable (the
only environment knob); everything else lives in configuration.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .seeding import split_seed

__all__ = [
    "WORKERS_ENV_VAR",
    "ReplicaOutcome",
    "worker_count",
    "run_replicas",
    "successful_values",
]

WORKERS_ENV_VAR = "VNLW_WORKERS"


@dataclass(frozen=True)
class ReplicaOutcome:
    """Result of one replica: either a value or a failure message."""

    index: int
    seed: int
    ok: bool
    value: object = None
    error: str = ""


def worker_count() -> int:
    """Read the worker count from the environment (default 1, serial)."""
    raw = os.environ.get(WORKERS_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        count = int(raw, 10)
    except ValueError:
        raise ValueError(
            f"{WORKERS_ENV_VAR}={raw!r} is not an integer worker count"
        ) from None
    if count < 1:
        raise ValueError(f"{WORKERS_ENV_VAR}={count} must be at least 1")
    return count


def _call(task: Callable[[int, int], object], index: int, seed: int) -> ReplicaOutcome:
    try:
        return ReplicaOutcome(index, seed, True, task(index, seed))
    except Exception as exc:  # noqa: BLE001 - failures are data here
        return ReplicaOutcome(index, seed, False, None, f"{type(exc).__name__}: {exc}")


def run_replicas(task: Callable[[int, int], object], replicas: int, master_seed: int,
                 workers: int | None = None) -> list[ReplicaOutcome]:
    """Run ``task(index, seed)`` for each replica and gather outcomes.

    ``task`` must be picklable (a module-level callable or a partial of
    one) when workers > 1.  Outcomes come back sorted by index, and a
    replica that raises is reported as failed with a warning instead of
    taking the ensemble down.
    """
    if replicas < 1:
        raise ValueError(f"replica count {replicas} must be at least 1")
    seeds = [split_seed(master_seed, i) for i in range(replicas)]
    count = worker_count() if workers is None else int(workers)
    if count < 1:
        raise ValueError(f"worker count {count} must be at least 1")
    if count == 1 or replicas == 1:
        outcomes = [_call(task, i, seed) for i, seed in enumerate(seeds)]
    else:
        with ProcessPoolExecutor(max_workers=min(count, replicas)) as pool:
            futures = [pool.submit(_call, task, i, seed)
                       for i, seed in enumerate(seeds)]
            outcomes = [future.result() for future in futures]
        outcomes.sort(key=lambda outcome: outcome.index)
    for outcome in outcomes:
        if not outcome.ok:
            warnings.warn(
                f"replica {outcome.index} (seed {outcome.seed}) failed: {outcome.error}",
                RuntimeWarning,
                stacklevel=2,
            )
    return outcomes


def successful_values(outcomes: Sequence[ReplicaOutcome]) -> list[object]:
    """Values of the successful replicas, in index order."""
    return [outcome.value for outcome in outcomes if outcome.ok]
