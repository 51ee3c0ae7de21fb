"""Command-line entry points.

One subcommand per study; every subcommand takes the same four options
and defers the science to :mod:`vnlw.experiments`.  Exit codes: 0 on
success, 2 for configuration problems, 3 when the evolution tripped the
blow-up flag.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import ConfigError, parse_config
from .experiments import run_experiment
from .solver import BlowUpError
from .version import __version__

__all__ = ["main"]


@click.group()
@click.version_option(version=__version__, prog_name="vnlw")
def main():
    """Pseudospectral laboratory for the damped quintic wave equation."""


def _common_options(fn):
    fn = click.option("--out", type=click.Path(file_okay=False), default=None,
                      help="Output directory override.")(fn)
    fn = click.option("--replicas", type=click.IntRange(min=1), default=None,
                      help="Ensemble size override.")(fn)
    fn = click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None,
                      help="Master seed override.")(fn)
    fn = click.option("--config", "config_path",
                      type=click.Path(exists=True, dir_okay=False), required=True,
                      help="Run configuration file.")(fn)
    return fn


def _execute(kind: str, config_path: str, seed, replicas, out) -> None:
    try:
        config = parse_config(Path(config_path).read_text(encoding="utf-8"))
    except ConfigError as err:
        for line in err.errors:
            click.echo(f"config error: {line}", err=True)
        sys.exit(2)
    config = config.with_overrides(seed=seed, replicas=replicas, out=out, kind=kind)
    try:
        manifest = run_experiment(config)
    except BlowUpError as err:
        click.echo(f"numerical failure: {err}", err=True)
        sys.exit(3)
    except ValueError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(2)
    click.echo(f"{kind}: wrote {len(manifest.artifacts)} artifacts to {config.output_dir}")


@main.command("solve")
@_common_options
def solve_command(config_path, seed, replicas, out):
    """March one trajectory; record energy, norms, and final snapshots."""
    _execute("solve", config_path, seed, replicas, out)


@main.command("mc-tail")
@_common_options
def mc_tail_command(config_path, seed, replicas, out):
    """Sample linear-flow norms over an ensemble and fit the tail."""
    _execute("mc-tail", config_path, seed, replicas, out)


@main.command("energy")
@_common_options
def energy_command(config_path, seed, replicas, out):
    """Record the energy budget; check dissipation or the increment bound."""
    _execute("energy", config_path, seed, replicas, out)


@main.command("schauder")
@_common_options
def schauder_command(config_path, seed, replicas, out):
    """Fit smoothing decay rates of the damping semigroup."""
    _execute("schauder", config_path, seed, replicas, out)


@main.command("norm-inflation")
@_common_options
def norm_inflation_command(config_path, seed, replicas, out):
    """Probe norm growth across a family of concentrating data."""
    _execute("norm-inflation", config_path, seed, replicas, out)


@main.command("truncation")
@_common_options
def truncation_command(config_path, seed, replicas, out):
    """Compare full runs against spectrally truncated ones."""
    _execute("truncation", config_path, seed, replicas, out)


@main.command("picard")
@_common_options
def picard_command(config_path, seed, replicas, out):
    """Run the local fixed-point iteration and report contraction."""
    _execute("picard", config_path, seed, replicas, out)


if __name__ == "__main__":
    main()
