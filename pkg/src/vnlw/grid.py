"""Periodic grids, real/spectral fields, and the binary snapshot format.

The simulation domain is the square [0, L)^2 with periodic boundary
conditions, sampled on an n-by-n lattice (n a power of two).  Spectral
coefficients follow the mode-amplitude convention

    f(x) = sum_k  c_k  exp(i xi_k . x),        c_k = FFT(f)_k / n^2,

so that a constant field c has c_0 = c and a single cosine of unit
amplitude carries 1/2 on each of its two conjugate modes.  Frequencies
xi_k = (2 pi / L) k live in radians per unit length and are laid out in
standard FFT order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "RealField",
    "SpectralField",
    "StatePair",
    "forward_transform",
    "inverse_transform",
    "conjugate_mirror",
    "hermitize",
    "write_snapshot",
    "read_snapshot",
    "SnapshotFormatError",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, length)^2.

    Parameters
    ----------
    n : int
        Number of sample points per axis; must be a power of two >= 8.
    length : float
        Side length L of the periodic square, > 0.
    """

    n: int
    length: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not _is_power_of_two(int(self.n)):
            raise ValueError(f"grid size n={self.n!r} must be a power of two")
        if self.n < 8:
            raise ValueError(f"grid size n={self.n} too small (need n >= 8)")
        if not (float(self.length) > 0.0) or not np.isfinite(self.length):
            raise ValueError(f"side length {self.length!r} must be positive and finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        """Mesh width h = length / n."""
        return self.length / self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @cached_property
    def axis_frequencies(self) -> np.ndarray:
        """1-D frequency axis in radians, FFT layout, shape (n,)."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)
        k.flags.writeable = False
        return k

    @cached_property
    def kx(self) -> np.ndarray:
        """First frequency component on the full lattice, shape (n, n)."""
        out = np.broadcast_to(self.axis_frequencies[:, None], self.shape).copy()
        out.flags.writeable = False
        return out

    @cached_property
    def ky(self) -> np.ndarray:
        """Second frequency component on the full lattice, shape (n, n)."""
        out = np.broadcast_to(self.axis_frequencies[None, :], self.shape).copy()
        out.flags.writeable = False
        return out

    @cached_property
    def k_abs(self) -> np.ndarray:
        """|xi| on the lattice."""
        out = np.hypot(self.kx, self.ky)
        out.flags.writeable = False
        return out

    @cached_property
    def k_sq(self) -> np.ndarray:
        """|xi|^2 on the lattice."""
        out = self.kx * self.kx + self.ky * self.ky
        out.flags.writeable = False
        return out

    @cached_property
    def bracket_k(self) -> np.ndarray:
        """Japanese bracket <xi> = sqrt(1 + |xi|^2) on the lattice."""
        out = np.sqrt(1.0 + self.k_sq)
        out.flags.writeable = False
        return out

    @property
    def nyquist(self) -> float:
        """Nyquist frequency pi * n / length in radians."""
        return np.pi * self.n / self.length

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical sample coordinates (X, Y), each shape (n, n)."""
        ax = np.arange(self.n) * self.spacing
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        X.flags.writeable = False
        Y.flags.writeable = False
        return X, Y


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class RealField:
    """Real scalar field sampled on a grid."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.shape != self.grid.shape:
            raise ValueError(f"sample shape {s.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("field samples contain non-finite values")
        object.__setattr__(self, "samples", _freeze(s))


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients of a field, FFT layout, amplitude convention."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("spectral coefficients contain non-finite values")
        object.__setattr__(self, "coeffs", _freeze(c))


@dataclass(frozen=True)
class StatePair:
    """Position/velocity pair (v, dv/dt) on a common grid."""

    position: RealField
    velocity: RealField

    def __post_init__(self):
        if self.position.grid != self.velocity.grid:
            raise ValueError("position and velocity live on different grids")

    @property
    def grid(self) -> Grid:
        return self.position.grid


def forward_transform(field: RealField) -> SpectralField:
    """Fourier-analyze a real field into mode amplitudes.

    Returns coefficients c_k = FFT(samples)_k / n^2, which are Hermitian
    symmetric up to rounding for real input.
    """
    n = field.grid.n
    coeffs = np.fft.fft2(field.samples) / (n * n)
    return SpectralField(field.grid, coeffs)


def inverse_transform(spec: SpectralField) -> RealField:
    """Synthesize the real field from mode amplitudes.

    The imaginary residue of the synthesis is discarded; for Hermitian
    coefficient arrays it sits at rounding level.  inverse(forward(f))
    reproduces f to better than 1e-12 in relative sup norm.
    """
    n = spec.grid.n
    values = np.fft.ifft2(spec.coeffs) * (n * n)
    return RealField(spec.grid, values.real)


def synthesize(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Raw complex synthesis of a coefficient array (internal helper)."""
    n = grid.n
    return np.fft.ifft2(coeffs) * (n * n)


def conjugate_mirror(coeffs: np.ndarray) -> np.ndarray:
    """Return the array m with m[k] = coeffs[-k mod n] along both axes."""
    return np.roll(coeffs[::-1, ::-1], shift=(1, 1), axis=(0, 1))


def hermitize(coeffs: np.ndarray) -> np.ndarray:
    """Project a coefficient array onto exact Hermitian symmetry.

    Averages each mode with the conjugate of its mirror mode; at
    self-conjugate lattice points (zero and Nyquist rows) this takes the
    real part, which is the correct aliased sampling of a real signal.
    """
    return 0.5 * (coeffs + np.conj(conjugate_mirror(coeffs)))


class SnapshotFormatError(ValueError):
    """Raised when a binary field snapshot is malformed."""


_MAGIC = b"VNLW"
_VERSION = 1
_HEADER = struct.Struct("<4sIII d")
_HEADER_SIZE = 64
KIND_REAL = 0


def write_snapshot(path, field: RealField, kind: int = KIND_REAL) -> None:
    """Write a field to the binary snapshot format.

    Layout: a 64-byte header (magic ``VNLW``, format version, points per
    axis, payload kind, side length as float64) padded with zeros, then
    the row-major float64 little-endian samples.  Round trips are
    bit-exact.
    """
    header = _HEADER.pack(_MAGIC, _VERSION, field.grid.n, int(kind), field.grid.length)
    header += b"\x00" * (_HEADER_SIZE - len(header))
    payload = np.ascontiguousarray(field.samples, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_snapshot(path) -> tuple[RealField, int]:
    """Read a binary field snapshot; returns (field, payload kind)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER_SIZE:
        raise SnapshotFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, n, kind, length = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise SnapshotFormatError(f"{path}: unsupported format version {version}")
    expected = _HEADER_SIZE + 8 * n * n
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{path}: payload length {len(raw) - _HEADER_SIZE} does not match n={n}"
        )
    grid = Grid(n, length)
    samples = np.frombuffer(raw, dtype="<f8", count=n * n, offset=_HEADER_SIZE)
    return RealField(grid, samples.reshape(n, n)), kind
