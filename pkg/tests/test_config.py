"""Tests for configuration parsing, validation, and canonical emission."""

import pytest

from vnlw.config import (
    ConfigError,
    RunConfig,
    config_digest,
    emit_config,
    parse_config,
)


MINIMAL = """
grid.n_points = 64
grid.side_length = 16.0
experiment.kind = solve
"""


def test_minimal_text_fills_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.grid.n_points == 64
    assert cfg.grid.side_length == 16.0
    assert cfg.solver.p == 5
    assert cfg.solver.mu == 0.5
    assert cfg.solver.delta == 0.2
    assert cfg.solver.padding == 3
    assert cfg.solver.dt == 1.0 / 256.0
    assert cfg.experiment.s1 == 0.55
    assert cfg.experiment.kind == "solve"
    assert cfg.randomization.kind == "none"
    assert cfg.data.profile == "rough"
    assert cfg.output_dir == "out"


def test_comments_and_blank_lines_are_ignored():
    cfg = parse_config("# a comment\n\ngrid.n_points = 32  # trailing\n")
    assert cfg.grid.n_points == 32


def test_all_errors_are_reported_at_once():
    bad = "\n".join(
        [
            "grid.n_points = 100",  # not a power of two
            "solver.mu = 1.5",  # out of range
            "what.is.this = 3",  # unknown key
            "grid.n_points = 64",  # duplicate
            "not a key value line",  # syntax
            "experiment.horizon = -1",  # range
        ]
    )
    with pytest.raises(ConfigError) as info:
        parse_config(bad)
    text = str(info.value)
    errors = info.value.errors
    assert len(errors) >= 5
    assert any("grid.n_points" in e and "power of two" in e for e in errors)
    assert any("solver.mu" in e for e in errors)
    assert any("unknown key" in e for e in errors)
    assert any("duplicate" in e for e in errors)
    assert any("key = value" in e for e in errors)
    assert any("experiment.horizon" in e for e in errors)
    assert "grid.n_points" in text


def test_value_parse_failures_name_the_key():
    with pytest.raises(ConfigError) as info:
        parse_config("grid.n_points = sixty-four\n")
    assert any("grid.n_points" in e for e in info.value.errors)
    with pytest.raises(ConfigError) as info:
        parse_config("data.normalize = yes\n")
    assert any("true or false" in e for e in info.value.errors)
    with pytest.raises(ConfigError) as info:
        parse_config("solver.dt = inf\n")
    assert any("solver.dt" in e for e in info.value.errors)


def test_canonical_round_trip():
    cfg = parse_config(MINIMAL)
    text = emit_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert emit_config(again) == text


def test_default_config_round_trips():
    cfg = RunConfig()
    assert parse_config(emit_config(cfg)) == cfg


def test_list_values_round_trip():
    cfg = parse_config("experiment.times = 0.25,0.5,1.0\n")
    assert cfg.experiment.times == (0.25, 0.5, 1.0)
    again = parse_config(emit_config(cfg))
    assert again.experiment.times == (0.25, 0.5, 1.0)
    with pytest.raises(ConfigError) as info:
        parse_config("experiment.times = 0.5,0.25\n")
    assert any("increasing" in e for e in info.value.errors)


def test_seventeen_digit_floats_survive():
    cfg = parse_config("grid.side_length = 32.000000000000004\n")
    assert cfg.grid.side_length == 32.000000000000004
    assert parse_config(emit_config(cfg)).grid.side_length == 32.000000000000004


def test_with_overrides():
    cfg = parse_config(MINIMAL)
    out = cfg.with_overrides(seed=7, replicas=12, out="elsewhere", kind="mc-tail")
    assert out.randomization.seed == 7
    assert out.randomization.ensemble == 12
    assert out.output_dir == "elsewhere"
    assert out.experiment.kind == "mc-tail"
    # the original is untouched
    assert cfg.randomization.seed == 0
    assert cfg.experiment.kind == "solve"
    assert cfg.with_overrides() == cfg


def test_digest_tracks_content():
    a = parse_config(MINIMAL)
    b = parse_config(MINIMAL.replace("16.0", "32.0"))
    assert config_digest(a) != config_digest(b)
    assert config_digest(a) == config_digest(parse_config(emit_config(a)))
    assert len(config_digest(a)) == 64


def test_snapshot_profile_requires_existing_files(tmp_path):
    text = "data.profile = snapshot\ndata.position_file = {}\n".format(
        tmp_path / "missing.snap"
    )
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert any("position_file" in e for e in info.value.errors)


def test_validation_covers_solver_and_experiment_ranges():
    cases = {
        "solver.p = 4": "solver.p",
        "solver.substeps = 0": "solver.substeps",
        "solver.padding = 1": "solver.padding",
        "solver.rule = euler": "solver.rule",
        "randomization.kind = cauchy": "randomization.kind",
        "randomization.ensemble = 0": "randomization.ensemble",
        "experiment.kind = fly": "experiment.kind",
        "experiment.q = 0.5": "experiment.q",
        "experiment.s1 = 0.4": "experiment.s1",
        "experiment.lambda_count = 2": "experiment.lambda_count",
        "output_dir =": "output_dir",
    }
    for line, key in cases.items():
        with pytest.raises(ConfigError) as info:
            parse_config(line + "\n")
        assert any(key in e for e in info.value.errors), (line, info.value.errors)
