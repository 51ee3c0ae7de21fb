"""Unit-cube frequency randomization of data pairs.

A real field f is split over unit frequency cubes by a tent partition of
unity, psi(xi) = prod_i max(0, 1 - |xi_i|), and each cube is reweighted
by an independent random coefficient:

    f^omega = sum_{n in Z^2}  g_n  psi(D - n) f .

Reality is preserved by drawing coefficients Hermitian, g_{-n} =
conj(g_n) with g_0 real, with independent draws indexed by the
canonical half lattice {n1 > 0} union {n1 = 0, n2 > 0}.  Both supported
kinds are normalized to E|g_n|^2 = 1 with E[g_n^2] = 0 off the origin,
which makes the mean-square lattice identities exact.

Cubes have side one in physical frequency (radians), so the number of
active cubes grows with the side length of the domain.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Grid, RealField, StatePair, forward_transform, inverse_transform, \
    SpectralField, hermitize
from .norms import spectral_sobolev
from .seeding import splitmix64, split_seed, as_u64, uniform_open, uniform_halfopen

__all__ = [
    "bump_value",
    "partition_sum",
    "CoefficientDraw",
    "draw_coefficients",
    "RandomizedPair",
    "randomize_pair",
    "unit_decompose",
    "squared_bump_sum",
    "decomposition_norm_sq",
    "MomentReport",
    "verify_subgaussian_moment",
    "COEFFICIENT_KINDS",
]

COEFFICIENT_KINDS = ("gaussian", "bernoulli", "ones")


def bump_value(x1, x2) -> np.ndarray:
    """Tent bump psi(xi) = max(0, 1-|xi_1|) * max(0, 1-|xi_2|).

    Even, supported in the closed cube [-1, 1]^2, and its integer
    translates sum to one everywhere.
    """
    t1 = np.maximum(0.0, 1.0 - np.abs(np.asarray(x1, dtype=np.float64)))
    t2 = np.maximum(0.0, 1.0 - np.abs(np.asarray(x2, dtype=np.float64)))
    return t1 * t2


def partition_sum(x1, x2) -> np.ndarray:
    """Sum of all integer translates of the bump at the given points."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    total = np.zeros(np.broadcast(x1, x2).shape)
    for d1 in (0, 1):
        for d2 in (0, 1):
            total += bump_value(x1 - (np.floor(x1) + d1), x2 - (np.floor(x2) + d2))
    return total


def _canonicalize(n1, n2):
    """Map each index to its canonical representative; return (m1, m2, flipped)."""
    n1 = np.asarray(n1)
    n2 = np.asarray(n2)
    flipped = (n1 < 0) | ((n1 == 0) & (n2 < 0))
    return np.where(flipped, -n1, n1), np.where(flipped, -n2, n2), flipped


@dataclass(frozen=True)
class CoefficientDraw:
    """A reproducible family of cube coefficients g_{n,j}.

    Coefficients are pure functions of (seed, n, j): each index is
    canonicalized, hashed into the seed with splitmix64, and converted
    to the requested distribution, so evaluation order cannot matter.

    kind
        ``gaussian``: standard complex Gaussian off the origin (real and
        imaginary parts independent N(0, 1/2)), real N(0, 1) at the
        origin.  ``bernoulli``: independent signs, +-1/sqrt(2) per real
        part off the origin and +-1 at the origin.  ``ones``: the
        degenerate diagnostic draw g = 1, which reproduces the input.
    """

    kind: str
    seed: int

    def __post_init__(self):
        if self.kind not in COEFFICIENT_KINDS:
            raise ValueError(
                f"unknown coefficient kind {self.kind!r}; expected one of {COEFFICIENT_KINDS}"
            )
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)

    def coefficients(self, n1, n2, component: int) -> np.ndarray:
        """Evaluate g_{n, component} at integer index arrays (n1, n2)."""
        if component not in (0, 1):
            raise ValueError(f"component {component} must be 0 (position) or 1 (velocity)")
        m1, m2, flipped = _canonicalize(n1, n2)
        if self.kind == "ones":
            return np.ones(np.broadcast(m1, m2).shape, dtype=np.complex128)
        h = splitmix64(np.uint64(self.seed) ^ splitmix64(as_u64(m1)))
        h = splitmix64(h ^ splitmix64(as_u64(m2)))
        h = splitmix64(h ^ np.uint64(component + 1))
        h2 = splitmix64(h)
        at_origin = (m1 == 0) & (m2 == 0)
        if self.kind == "gaussian":
            radius = np.sqrt(-2.0 * np.log(uniform_open(h)))
            angle = 2.0 * np.pi * uniform_halfopen(h2)
            re = radius * np.cos(angle)
            im = radius * np.sin(angle)
            g = (re + 1j * im) / np.sqrt(2.0)
            g = np.where(at_origin, re.astype(np.complex128), g)
        else:
            sign_re = 1.0 - 2.0 * (h & np.uint64(1)).astype(np.float64)
            sign_im = 1.0 - 2.0 * (h2 & np.uint64(1)).astype(np.float64)
            g = (sign_re + 1j * sign_im) / np.sqrt(2.0)
            g = np.where(at_origin, sign_re.astype(np.complex128), g)
        return np.where(flipped, np.conj(g), g)


def draw_coefficients(kind: str, seed: int) -> CoefficientDraw:
    """Construct a coefficient draw; unknown kinds are rejected."""
    return CoefficientDraw(kind, seed)


@lru_cache(maxsize=16)
def _assembly(grid: Grid):
    """Bilinear-assembly tables for a grid: window origin, indices, weights."""
    k = grid.axis_frequencies
    lo = int(np.floor(k.min()))
    base1 = np.floor(grid.kx).astype(np.int64)
    base2 = np.floor(grid.ky).astype(np.int64)
    fx = grid.kx - base1
    fy = grid.ky - base2
    hi = int(max(base1.max(), base2.max())) + 1
    idx1 = base1 - lo
    idx2 = base2 - lo
    weights = (
        (1.0 - fx) * (1.0 - fy),
        fx * (1.0 - fy),
        (1.0 - fx) * fy,
        fx * fy,
    )
    return lo, hi, idx1, idx2, weights


def cube_window(grid: Grid) -> tuple[int, int]:
    """Integer range [lo, hi] of cube centers with support on the lattice."""
    lo, hi, *_ = _assembly(grid)
    return lo, hi


def _random_multiplier(grid: Grid, draw: CoefficientDraw, component: int) -> np.ndarray:
    """Lattice values of sum_n g_n psi(xi - n), Hermitian-symmetrized."""
    lo, hi, idx1, idx2, (w00, w10, w01, w11) = _assembly(grid)
    centers = np.arange(lo, hi + 1)
    c1, c2 = np.meshgrid(centers, centers, indexing="ij")
    g = draw.coefficients(c1, c2, component)
    m = (w00 * g[idx1, idx2] + w10 * g[idx1 + 1, idx2]
         + w01 * g[idx1, idx2 + 1] + w11 * g[idx1 + 1, idx2 + 1])
    return hermitize(m)


def squared_bump_sum(grid: Grid) -> np.ndarray:
    """Lattice values of sum_n psi(xi - n)^2.

    This is the exact per-mode variance weight of the randomization:
    E |f^omega hat(xi)|^2 = (that sum) |f hat(xi)|^2 for data without
    Nyquist content.
    """
    _, _, _, _, (w00, w10, w01, w11) = _assembly(grid)
    return w00 ** 2 + w10 ** 2 + w01 ** 2 + w11 ** 2


def decomposition_norm_sq(field: RealField, s: float = 0.0) -> float:
    """Exact value of sum over cubes of ||<grad>^s psi(D-n) f||_{L^2}^2."""
    grid = field.grid
    coeffs = forward_transform(field).coeffs
    w = squared_bump_sum(grid) * grid.bracket_k ** (2.0 * s)
    return float(grid.length ** 2 * np.sum(w * np.abs(coeffs) ** 2))


def _pair_digest(pair: StatePair) -> str:
    h = hashlib.sha256()
    h.update(np.float64(pair.grid.length).tobytes())
    h.update(np.int64(pair.grid.n).tobytes())
    h.update(pair.position.samples.tobytes())
    h.update(pair.velocity.samples.tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class RandomizedPair:
    """A randomized data pair together with its provenance."""

    position: RealField
    velocity: RealField
    kind: str
    seed: int
    source_digest: str

    @property
    def grid(self) -> Grid:
        return self.position.grid

    @property
    def pair(self) -> StatePair:
        return StatePair(self.position, self.velocity)


def randomize_pair(pair: StatePair, draw: CoefficientDraw) -> RandomizedPair:
    """Randomize both components of a data pair over unit frequency cubes.

    The position and velocity use independent coefficient streams from
    the same draw.  Output fields are exactly real: the assembled cube
    multiplier is Hermitian-symmetrized before synthesis, which on
    self-conjugate lattice points is precisely the aliased sampling of
    the real continuum randomization.
    """
    grid = pair.grid
    out = []
    for component, field in enumerate((pair.position, pair.velocity)):
        m = _random_multiplier(grid, draw, component)
        coeffs = forward_transform(field).coeffs
        out.append(inverse_transform(SpectralField(grid, m * coeffs)))
    return RandomizedPair(out[0], out[1], draw.kind, draw.seed, _pair_digest(pair))


def randomized_coefficient_arrays(pair: StatePair, draw: CoefficientDraw):
    """Spectral coefficients of the randomized pair (solver fast path)."""
    grid = pair.grid
    m0 = _random_multiplier(grid, draw, 0)
    m1 = _random_multiplier(grid, draw, 1)
    c0 = forward_transform(pair.position).coeffs
    c1 = forward_transform(pair.velocity).coeffs
    return m0 * c0, m1 * c1


def unit_decompose(field: RealField) -> dict[tuple[int, int], RealField]:
    """Split a real field into its unit-cube pieces.

    Pieces are indexed by canonical cube centers: the piece at n combines
    the cubes at n and -n (so that it is itself a real field), and the
    origin piece is the single central cube.  The pieces sum to the
    input exactly up to rounding; pieces that vanish identically are
    omitted.
    """
    grid = field.grid
    coeffs = forward_transform(field).coeffs
    lo, hi, *_ = _assembly(grid)
    span = max(-lo, hi)  # the window is asymmetric; cover both signs
    kx, ky = grid.kx, grid.ky
    pieces: dict[tuple[int, int], RealField] = {}
    for n1 in range(0, span + 1):
        for n2 in range(-span, span + 1):
            if n1 == 0 and n2 < 0:
                continue
            sym = bump_value(kx - n1, ky - n2)
            if (n1, n2) != (0, 0):
                sym = sym + bump_value(kx + n1, ky + n2)
            piece = sym * coeffs
            if not np.any(piece):
                continue
            pieces[(n1, n2)] = inverse_transform(SpectralField(grid, piece))
    return pieces


@dataclass(frozen=True)
class MomentReport:
    """Empirical check of one subgaussian moment of a coefficient sum."""

    p: int
    kind: str
    ensemble: int
    empirical_moment: float
    coefficient_norm: float
    bound_ratio: float
    second_moment_mean: float
    second_moment_se: float


def verify_subgaussian_moment(coefficients: dict, p: int, kind: str,
                              ensemble: int, seed: int = 0) -> MomentReport:
    """Estimate || sum_n g_n c_n ||_{L^p(Omega)} over a coefficient ensemble.

    Parameters
    ----------
    coefficients : dict
        Finite-support map (n1, n2) -> complex amplitude.
    p : int
        Even moment order in [2, 12].
    kind : str
        Coefficient kind, ``gaussian`` or ``bernoulli``.
    ensemble : int
        Number of independent draws, at least 1000.

    Returns
    -------
    MomentReport
        Contains the empirical moment, its ratio to sqrt(p) times the
        l^2 norm of the coefficients, and the mean/standard error of
        |S|^2, whose expectation equals the l^2 norm squared exactly.
    """
    if p % 2 != 0 or not (2 <= p <= 12):
        raise ValueError(f"moment order p={p} must be even and within [2, 12]")
    if ensemble < 1000:
        raise ValueError(f"ensemble size {ensemble} too small for a moment estimate (need >= 1000)")
    if kind == "ones":
        raise ValueError("the degenerate 'ones' draw has no moment content")
    if not coefficients:
        raise ValueError("coefficient support is empty")
    idx = np.array(sorted(coefficients.keys()), dtype=np.int64)
    amps = np.array([coefficients[tuple(k)] for k in idx], dtype=np.complex128)
    n1, n2 = idx[:, 0], idx[:, 1]
    sums = np.empty(ensemble, dtype=np.complex128)
    for i in range(ensemble):
        draw = CoefficientDraw(kind, split_seed(seed, i))
        sums[i] = np.sum(draw.coefficients(n1, n2, 0) * amps)
    absq = np.abs(sums) ** 2
    emp = float(np.mean(np.abs(sums) ** p) ** (1.0 / p))
    cnorm = float(np.linalg.norm(amps))
    return MomentReport(
        p=p,
        kind=kind,
        ensemble=ensemble,
        empirical_moment=emp,
        coefficient_norm=cnorm,
        bound_ratio=emp / (np.sqrt(p) * cnorm),
        second_moment_mean=float(absq.mean()),
        second_moment_se=float(absq.std(ddof=1) / np.sqrt(ensemble)),
    )
