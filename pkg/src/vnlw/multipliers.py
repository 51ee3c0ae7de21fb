"""Fourier multiplier operators: fractional Laplacians, smoothing, projections.

All operators act diagonally on the mode amplitudes of a real field and
return real fields; every symbol used here is even in xi, so Hermitian
symmetry (hence reality) is preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid, RealField, forward_transform, inverse_transform, SpectralField

__all__ = [
    "MultiplierSymbol",
    "apply_multiplier",
    "frac_laplacian",
    "frac_laplacian_symbol",
    "bessel_potential",
    "bessel_symbol",
    "poisson_smooth",
    "poisson_symbol",
    "smooth_cutoff",
    "low_pass_symbol",
    "project_low",
    "project_high",
    "shell_symbol",
    "shell_project",
]


@dataclass(frozen=True)
class MultiplierSymbol:
    """A scalar symbol m(xi) evaluable on the frequency lattice.

    Parameters
    ----------
    fn : callable
        Maps frequency component arrays (kx, ky) to the symbol values,
        elementwise.  Removable singularities (typically at xi = 0) must
        be resolved inside ``fn``; the evaluation is checked for
        non-finite values.
    name : str
        Short label used in error messages.
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "multiplier"

    def on_lattice(self, grid: Grid) -> np.ndarray:
        values = np.asarray(self.fn(grid.kx, grid.ky))
        if values.shape != grid.shape:
            raise ValueError(f"{self.name}: symbol evaluation has shape {values.shape}, "
                             f"expected {grid.shape}")
        bad = ~np.isfinite(values)
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            raise ValueError(
                f"{self.name}: non-finite symbol value at frequency "
                f"({grid.kx[i, j]:.6g}, {grid.ky[i, j]:.6g})"
            )
        return values


def apply_multiplier(field: RealField, symbol: MultiplierSymbol) -> RealField:
    """Apply a Fourier multiplier to a real field.

    The symbol is evaluated on the lattice of ``field.grid`` and must be
    finite there.  For symbols that are even and real the output is real
    to rounding accuracy; the imaginary residue is discarded.
    """
    values = symbol.on_lattice(field.grid)
    spec = forward_transform(field)
    return inverse_transform(SpectralField(field.grid, values * spec.coeffs))


def _apply_array(field: RealField, values: np.ndarray) -> RealField:
    spec = forward_transform(field)
    return inverse_transform(SpectralField(field.grid, values * spec.coeffs))


def frac_laplacian_symbol(grid: Grid, alpha: float) -> np.ndarray:
    if alpha < 0:
        raise ValueError(f"fractional Laplacian order alpha={alpha} must be >= 0 "
                         "(negative powers are not invertible on the mean mode)")
    if alpha == 0:
        return np.ones(grid.shape)
    return grid.k_abs ** alpha


def frac_laplacian(field: RealField, alpha: float) -> RealField:
    """Apply |grad|^alpha = (-Laplacian)^(alpha/2), alpha >= 0.

    For alpha > 0 the symbol vanishes at xi = 0, so the output has zero
    mean; alpha = 0 is the identity.
    """
    return _apply_array(field, frac_laplacian_symbol(field.grid, alpha))


def bessel_symbol(grid: Grid, s: float) -> np.ndarray:
    return grid.bracket_k ** s


def bessel_potential(field: RealField, s: float) -> RealField:
    """Apply <grad>^s with <xi> = sqrt(1 + |xi|^2); any real s."""
    return _apply_array(field, bessel_symbol(field.grid, s))


def poisson_symbol(grid: Grid, t: float) -> np.ndarray:
    if t < 0:
        raise ValueError(f"smoothing time t={t} must be >= 0")
    return np.exp(-grid.k_abs * (t / 2.0))


def poisson_smooth(field: RealField, t: float) -> RealField:
    """Half-rate Poisson smoothing exp(-t |grad| / 2), t >= 0.

    This is the decay factor of the damped wave propagator; it forms a
    semigroup in t and contracts every L^p norm.
    """
    return _apply_array(field, poisson_symbol(field.grid, t))


def smooth_cutoff(r: np.ndarray, cutoff: float) -> np.ndarray:
    """C^1 radial cutoff: 1 on r <= cutoff, 0 on r >= 2*cutoff.

    The transition over the octave [cutoff, 2*cutoff] is the cubic
    smoothstep, so the profile is continuously differentiable.
    """
    if cutoff <= 0:
        raise ValueError(f"cutoff frequency {cutoff} must be positive")
    u = np.clip((np.asarray(r, dtype=np.float64) - cutoff) / cutoff, 0.0, 1.0)
    return 1.0 - u * u * (3.0 - 2.0 * u)


def low_pass_symbol(grid: Grid, cutoff: float) -> np.ndarray:
    return smooth_cutoff(grid.k_abs, cutoff)


def project_low(field: RealField, cutoff: float) -> RealField:
    """Smooth projection onto frequencies |xi| <= cutoff.

    Modes with |xi| <= cutoff pass unchanged and modes with
    |xi| >= 2*cutoff are annihilated, with a C^1 radial transition in
    between.  A cutoff at or above sqrt(2) times the Nyquist frequency
    is the identity.
    """
    return _apply_array(field, low_pass_symbol(field.grid, cutoff))


def project_high(field: RealField, cutoff: float) -> RealField:
    """Complement of :func:`project_low`; the pair sums to the identity."""
    return _apply_array(field, 1.0 - low_pass_symbol(field.grid, cutoff))


def _is_dyadic(m: float) -> bool:
    if m <= 0:
        return False
    return 2.0 ** round(np.log2(m)) == m


def shell_symbol(grid: Grid, m: float) -> np.ndarray:
    if not _is_dyadic(m):
        raise ValueError(f"shell frequency M={m} must be dyadic (2^j)")
    if m < 1.0:
        return np.zeros(grid.shape)
    if m == 1.0:
        return low_pass_symbol(grid, 1.0)
    return low_pass_symbol(grid, m) - low_pass_symbol(grid, m / 2.0)


def shell_project(field: RealField, m: float) -> RealField:
    """Dyadic frequency-shell projection onto |xi| ~ M.

    The shells telescope from the low-pass cutoffs: the M = 1 shell
    keeps everything below the first octave (the shell at 1/2 is zero by
    convention) and for M >= 2 the shell is supported on
    M/2 < |xi| < 2M.  Summing the shells up to any M that clears the
    lattice recovers the identity exactly.
    """
    return _apply_array(field, shell_symbol(field.grid, m))
