"""Analytic and pseudo-random data factories.

Every factory returns fields with exact Hermitian spectra and empty
Nyquist rows, so that randomization and norm identities hold to
rounding.  Pseudo-random phases are derived from the package's own
64-bit mixing chain keyed by the integer mode index, which keeps the
fields byte-reproducible independently of any library RNG.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, RealField, SpectralField, StatePair, hermitize, inverse_transform
from .norms import spectral_pair_norm
from .seeding import as_u64, splitmix64, uniform_halfopen

__all__ = [
    "zero_field",
    "zero_pair",
    "constant_field",
    "single_mode",
    "single_mode_pair",
    "gaussian_bump",
    "rough_pair",
    "rate_probe_field",
    "packet_pair",
]


def zero_field(grid: Grid) -> RealField:
    return RealField(grid, np.zeros(grid.shape))


def zero_pair(grid: Grid) -> StatePair:
    z = zero_field(grid)
    return StatePair(z, z)


def constant_field(grid: Grid, value: float) -> RealField:
    return RealField(grid, np.full(grid.shape, float(value)))


def _mode_indices(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    ix = np.fft.fftfreq(grid.n, 1.0 / grid.n).astype(np.int64)
    return np.meshgrid(ix, ix, indexing="ij")


def _clear_nyquist(coeffs: np.ndarray) -> np.ndarray:
    half = coeffs.shape[0] // 2
    coeffs[half, :] = 0.0
    coeffs[:, half] = 0.0
    return coeffs


def single_mode(grid: Grid, index: tuple[int, int] = (1, 0), amplitude: float = 1.0,
                phase: float = 0.0) -> RealField:
    """Single cosine amplitude * cos(xi . x + phase) at an integer mode index."""
    j1, j2 = int(index[0]), int(index[1])
    half = grid.n // 2
    if not (-half < j1 < half and -half < j2 < half) or (j1, j2) == (0, 0):
        raise ValueError(f"mode index {index} must be nonzero and below the Nyquist index")
    scale = 2.0 * np.pi / grid.length
    x, y = grid.coordinates
    samples = amplitude * np.cos(scale * (j1 * x + j2 * y) + phase)
    return RealField(grid, samples)


def single_mode_pair(grid: Grid, index: tuple[int, int] = (1, 0),
                     amplitude: float = 1.0) -> StatePair:
    return StatePair(single_mode(grid, index, amplitude), zero_field(grid))


def gaussian_bump(grid: Grid, width: float | None = None, amplitude: float = 1.0,
                  center: tuple[float, float] | None = None) -> RealField:
    """Smooth localized bump exp(-|x - c|^2 / (2 width^2)).

    The default width L/16 keeps the periodic images negligible at
    double precision while the spectrum still spans many cubes.
    """
    w = grid.length / 16.0 if width is None else float(width)
    if w <= 0:
        raise ValueError(f"bump width {w} must be positive")
    cx, cy = (grid.length / 2.0, grid.length / 2.0) if center is None else center
    x, y = grid.coordinates
    dx = x - cx
    dy = y - cy
    samples = amplitude * np.exp(-(dx * dx + dy * dy) / (2.0 * w * w))
    return RealField(grid, samples)


def _phase_array(grid: Grid, seed: int, component: int) -> np.ndarray:
    i1, i2 = _mode_indices(grid)
    h = splitmix64(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF) ^ splitmix64(as_u64(i1)))
    h = splitmix64(h ^ splitmix64(as_u64(i2)))
    h = splitmix64(h ^ np.uint64(0xD1F + component))
    return 2.0 * np.pi * uniform_halfopen(h)


def rough_pair(grid: Grid, decay_position: float = 2.0, decay_velocity: float = 1.1,
               seed: int = 12, normalize: float | None = 0.0) -> StatePair:
    """Random-phase pair with power-law coefficient decay.

    Coefficient magnitudes follow <xi>^{-decay} per component, with
    phases drawn deterministically from the seed; the Nyquist rows are
    cleared and the spectrum Hermitian-symmetrized.  With ``normalize``
    set (the default), both components are scaled together so the pair
    norm at that regularity is 1.  Decay exponents place the pair just
    inside a Sobolev class: the position component lies in H^s exactly
    for s < decay_position - 1, the velocity in H^{s-1} for
    s < decay_velocity.
    """
    bracket = grid.bracket_k
    c0 = bracket ** (-decay_position) * np.exp(1j * _phase_array(grid, seed, 0))
    c1 = bracket ** (-decay_velocity) * np.exp(1j * _phase_array(grid, seed, 1))
    c0 = hermitize(_clear_nyquist(c0))
    c1 = hermitize(_clear_nyquist(c1))
    if normalize is not None:
        total = spectral_pair_norm(grid, c0, c1, normalize)
        c0 = c0 / total
        c1 = c1 / total
    return StatePair(
        inverse_transform(SpectralField(grid, c0)),
        inverse_transform(SpectralField(grid, c1)),
    )


def rate_probe_field(grid: Grid) -> RealField:
    """Field saturating the Poisson smoothing rates on this grid.

    Coefficients carry magnitude 1/|xi| with all phases aligned (real
    and positive), so the supremum sits at the origin deterministically
    and both the L^2 -> L^2 and L^2 -> L^inf smoothing ratios decay at
    their reference exponents instead of merely below them.  The zero
    mode carries the average of 1/|xi| over the central frequency cell,
    4 ln(1 + sqrt 2) / spacing, which continues the profile through the
    infrared instead of puncturing it.  Nyquist rows are cleared.
    """
    r = grid.k_abs
    cell = 2.0 * np.pi / grid.length
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    nz = r > 0
    coeffs[nz] = 1.0 / r[nz]
    coeffs[0, 0] = 4.0 * np.log(1.0 + np.sqrt(2.0)) / cell
    coeffs = hermitize(_clear_nyquist(coeffs))
    return inverse_transform(SpectralField(grid, coeffs))


def packet_pair(grid: Grid, frequency_index: int, amplitude: float,
                width: float | None = None) -> StatePair:
    """High-frequency bubble: a cosine carrier under a Gaussian envelope.

    The pair (packet, 0) concentrates its spectrum near the carrier
    frequency, so its norm at negative regularity shrinks as the carrier
    grows; a family across doubling carriers probes amplification
    trends below the critical index.
    """
    m = int(frequency_index)
    if not (0 < m < grid.n // 2):
        raise ValueError(f"carrier index {m} must lie inside the resolvable band")
    w = grid.length / 8.0 if width is None else float(width)
    envelope = gaussian_bump(grid, width=w, amplitude=amplitude)
    x, _ = grid.coordinates
    carrier = np.cos(2.0 * np.pi * m * x / grid.length)
    return StatePair(RealField(grid, envelope.samples * carrier), zero_field(grid))
