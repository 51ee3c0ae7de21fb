"""Tests for the unit-cube randomization layer."""

import numpy as np
import pytest

from vnlw.grid import Grid, StatePair, forward_transform
from vnlw.profiles import gaussian_bump, rough_pair, zero_field
from vnlw.wiener import (
    CoefficientDraw,
    bump_value,
    cube_window,
    decomposition_norm_sq,
    draw_coefficients,
    partition_sum,
    randomize_pair,
    randomized_coefficient_arrays,
    squared_bump_sum,
    unit_decompose,
    verify_subgaussian_moment,
)


def test_bump_hand_values():
    assert bump_value(0.0, 0.0) == 1.0
    assert bump_value(0.5, 0.0) == 0.5
    assert bump_value(0.25, 0.5) == pytest.approx(0.375)
    assert bump_value(1.0, 0.3) == 0.0
    assert bump_value(-0.3, 0.4) == pytest.approx(0.7 * 0.6)
    assert bump_value(-0.3, 0.4) == bump_value(0.3, -0.4)


def test_translates_partition_unity():
    pts = np.linspace(-7.3, 6.9, 113)
    x1, x2 = np.meshgrid(pts, pts, indexing="ij")
    total = partition_sum(x1, x2)
    assert np.max(np.abs(total - 1.0)) <= 1e-12


@pytest.mark.parametrize("kind", ["gaussian", "bernoulli"])
def test_coefficients_are_hermitian_and_deterministic(kind):
    draw = draw_coefficients(kind, 42)
    n1 = np.array([1, 0, 2, -3, 5, 0])
    n2 = np.array([0, 1, -2, 4, 5, 0])
    g = draw.coefficients(n1, n2, 0)
    g_neg = draw.coefficients(-n1, -n2, 0)
    assert np.max(np.abs(g_neg - np.conj(g))) == 0.0
    assert g[5].imag == 0.0  # origin coefficient is real
    again = draw.coefficients(n1, n2, 0)
    assert np.array_equal(g, again)
    other_seed = draw_coefficients(kind, 43).coefficients(n1, n2, 0)
    assert np.any(other_seed != g)
    other_component = draw.coefficients(n1, n2, 1)
    assert np.any(other_component != g)


def test_coefficients_are_order_independent():
    draw = draw_coefficients("gaussian", 7)
    n1 = np.arange(-6, 7)
    n2 = np.arange(-6, 7)[::-1].copy()
    g = draw.coefficients(n1, n2, 0)
    perm = np.random.default_rng(0).permutation(len(n1))
    g_perm = draw.coefficients(n1[perm], n2[perm], 0)
    assert np.array_equal(g, g_perm[np.argsort(perm)])


def test_bernoulli_values_lie_on_the_sign_lattice():
    draw = draw_coefficients("bernoulli", 11)
    n = np.arange(1, 200)
    g = draw.coefficients(n, np.zeros_like(n), 0)
    root_half = 1.0 / np.sqrt(2.0)
    assert np.max(np.abs(np.abs(g.real) - root_half)) == 0.0
    assert np.max(np.abs(np.abs(g.imag) - root_half)) == 0.0
    assert np.max(np.abs(np.abs(g) - 1.0)) <= 1e-15
    origin = draw.coefficients(np.array([0]), np.array([0]), 0)
    assert origin[0] in (1.0 + 0.0j, -1.0 + 0.0j)
    # both signs occur on a long stretch
    assert np.any(g.real > 0) and np.any(g.real < 0)


def test_gaussian_unit_variance():
    draw = draw_coefficients("gaussian", 3)
    n = np.arange(1, 4001)
    g = draw.coefficients(n, np.zeros_like(n), 0)
    mean_sq = float(np.mean(np.abs(g) ** 2))
    se = float(np.std(np.abs(g) ** 2, ddof=1) / np.sqrt(g.size))
    assert abs(mean_sq - 1.0) <= 5.0 * se
    assert abs(float(np.mean(g.real))) <= 5.0 * float(np.std(g.real) / np.sqrt(g.size))


def test_unknown_kind_and_component_rejected():
    with pytest.raises(ValueError, match="kind"):
        draw_coefficients("cauchy", 0)
    draw = draw_coefficients("gaussian", 0)
    with pytest.raises(ValueError, match="component"):
        draw.coefficients(np.array([1]), np.array([0]), 2)


def test_multiplier_assembly_matches_direct_cube_sum():
    # Build sum_n g_n psi(xi - n) on the lattice by explicit summation
    # over every cube center and compare with the randomized output.
    grid = Grid(16, 8.0)
    pair = rough_pair(grid, decay_position=0.0, decay_velocity=0.0, seed=2, normalize=None)
    draw = draw_coefficients("gaussian", 99)
    lo, hi = cube_window(grid)
    direct = np.zeros(grid.shape, dtype=np.complex128)
    for n1 in range(lo, hi + 1):
        for n2 in range(lo, hi + 1):
            g = draw.coefficients(np.array([n1]), np.array([n2]), 0)[0]
            direct += g * bump_value(grid.kx - n1, grid.ky - n2)
    c0 = forward_transform(pair.position).coeffs
    got = forward_transform(randomize_pair(pair, draw).position).coeffs
    assert np.max(np.abs(got - direct * c0)) <= 1e-12


def test_ones_draw_reproduces_input():
    grid = Grid(32, 16.0)
    pair = rough_pair(grid, seed=4)
    out = randomize_pair(pair, draw_coefficients("ones", 123))
    assert np.max(np.abs(out.position.samples - pair.position.samples)) <= 1e-12
    assert np.max(np.abs(out.velocity.samples - pair.velocity.samples)) <= 1e-12
    assert out.kind == "ones"
    assert out.seed == 123


def test_randomization_is_exactly_real():
    grid = Grid(32, 16.0)
    pair = rough_pair(grid, seed=8)
    draw = draw_coefficients("gaussian", 17)
    m0, _ = randomized_coefficient_arrays(pair, draw)
    synth = np.fft.ifft2(m0) * grid.n**2
    assert np.max(np.abs(synth.imag)) <= 1e-12 * max(1.0, np.max(np.abs(synth.real)))


def test_randomized_arrays_agree_with_randomized_fields():
    grid = Grid(16, 8.0)
    pair = rough_pair(grid, seed=21)
    draw = draw_coefficients("bernoulli", 5)
    m0c0, m1c1 = randomized_coefficient_arrays(pair, draw)
    fields = randomize_pair(pair, draw)
    assert np.max(np.abs(forward_transform(fields.position).coeffs - m0c0)) <= 1e-13
    assert np.max(np.abs(forward_transform(fields.velocity).coeffs - m1c1)) <= 1e-13


def test_unit_decompose_reassembles_input():
    grid = Grid(16, 8.0)
    field = gaussian_bump(grid, width=1.0, amplitude=2.0)
    pieces = unit_decompose(field)
    assert pieces, "decomposition should produce pieces"
    total = np.zeros(grid.shape)
    for (n1, n2), piece in pieces.items():
        assert n1 > 0 or (n1 == 0 and n2 >= 0)
        total += piece.samples
    assert np.max(np.abs(total - field.samples)) <= 1e-12 * np.max(np.abs(field.samples))


def test_squared_bump_sum_matches_direct_sum():
    grid = Grid(16, 8.0)
    lo, hi = cube_window(grid)
    direct = np.zeros(grid.shape)
    for n1 in range(lo, hi + 1):
        for n2 in range(lo, hi + 1):
            direct += bump_value(grid.kx - n1, grid.ky - n2) ** 2
    assert np.max(np.abs(squared_bump_sum(grid) - direct)) <= 1e-13


def test_decomposition_norm_matches_piecewise_oracle():
    grid = Grid(16, 8.0)
    field = rough_pair(grid, seed=6).position
    coeffs = forward_transform(field).coeffs
    lo, hi = cube_window(grid)
    for s in (0.0, 0.7):
        weight = grid.bracket_k ** (2.0 * s)
        oracle = 0.0
        for n1 in range(lo, hi + 1):
            for n2 in range(lo, hi + 1):
                sym = bump_value(grid.kx - n1, grid.ky - n2)
                oracle += grid.length**2 * float(np.sum(weight * np.abs(sym * coeffs) ** 2))
        got = decomposition_norm_sq(field, s)
        assert got == pytest.approx(oracle, rel=1e-10)


def test_subgaussian_moment_second_order_identity():
    coeffs = {
        (1, 0): 0.5 + 0.25j,
        (0, 1): -0.75j,
        (2, 2): 1.0,
        (3, -1): 0.3 - 0.4j,
    }
    report = verify_subgaussian_moment(coeffs, p=2, kind="gaussian", ensemble=1500, seed=1)
    target = report.coefficient_norm**2
    assert abs(report.second_moment_mean - target) <= 4.0 * report.second_moment_se
    assert report.empirical_moment == pytest.approx(
        np.sqrt(report.second_moment_mean), rel=1e-12
    )
    assert report.bound_ratio <= 1.5


def test_subgaussian_moment_validation():
    coeffs = {(1, 0): 1.0}
    with pytest.raises(ValueError, match="even"):
        verify_subgaussian_moment(coeffs, p=3, kind="gaussian", ensemble=1000)
    with pytest.raises(ValueError, match="ensemble"):
        verify_subgaussian_moment(coeffs, p=2, kind="gaussian", ensemble=10)
    with pytest.raises(ValueError, match="ones"):
        verify_subgaussian_moment(coeffs, p=2, kind="ones", ensemble=1000)
    with pytest.raises(ValueError, match="empty"):
        verify_subgaussian_moment({}, p=2, kind="gaussian", ensemble=1000)


def test_randomize_rejects_nothing_but_records_digest():
    grid = Grid(16, 8.0)
    pair = StatePair(zero_field(grid), zero_field(grid))
    draw = draw_coefficients("gaussian", 1)
    out = randomize_pair(pair, draw)
    assert np.max(np.abs(out.position.samples)) == 0.0
    assert len(out.source_digest) == 16
    other = randomize_pair(rough_pair(grid, seed=3), draw)
    assert other.source_digest != out.source_digest
