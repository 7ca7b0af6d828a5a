"""
Forward/inverse transforms and spectral multipliers on the periodic grid.

Normalization is 1/N² on the forward transform and none on the inverse, so the
zero mode of a field's spectrum is its mean. Array-level helpers
(``to_spectral`` / ``to_physical``) are used by the time steppers; the
RealField/SpectralField functions validate their inputs and outputs.
"""
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.fft

from domain.fields import GridSpec, RealField, SpectralField
from infrastructure.error_handling.exceptions import AsymmetricSpectrumError, SingularMultiplierError

IMAGINARY_TOLERANCE = 1e-10
ZERO_MODE_TOLERANCE = 1e-10

Symbol = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Multiplier:
    """A real symbol s(|k|²); ``singular_at_zero`` pins the k=0 multiplier to 0."""

    name: str
    symbol: Symbol
    singular_at_zero: bool = False


LAPLACIAN = Multiplier("laplacian", lambda k2: -k2)
BILAPLACIAN = Multiplier("bilaplacian", lambda k2: k2 ** 2)
INVERSE_NEG_LAPLACIAN = Multiplier("inverse_neg_laplacian", lambda k2: 1.0 / k2, singular_at_zero=True)


def to_spectral(values: np.ndarray) -> np.ndarray:
    return scipy.fft.fft2(values, norm="forward")


def to_physical(coeffs: np.ndarray) -> np.ndarray:
    """Inverse transform keeping only the real part."""
    return scipy.fft.ifft2(coeffs, norm="forward").real


def forward(f: RealField) -> SpectralField:
    """v̂_k = (1/N²) Σ_j f(x_j) e^{−i k·x_j}."""
    return SpectralField(f.grid, to_spectral(f.values))


def inverse(v: SpectralField) -> RealField:
    """
    Exact inverse of ``forward``.

    Raises:
        AsymmetricSpectrumError: if the imaginary residue exceeds 1e-10 relative
            to max(1, max |real part|)
    """
    samples = scipy.fft.ifft2(v.coeffs, norm="forward")
    scale = max(1.0, float(np.max(np.abs(samples.real))))
    residue = float(np.max(np.abs(samples.imag)))
    if residue > IMAGINARY_TOLERANCE * scale:
        raise AsymmetricSpectrumError(residue, IMAGINARY_TOLERANCE * scale)
    return RealField(v.grid, samples.real)


def multiplier_array(grid: GridSpec, s: Union[Multiplier, Symbol]) -> np.ndarray:
    """Evaluate s on the grid's physical |k|², pinning singular zero modes."""
    if not isinstance(s, Multiplier):
        s = Multiplier(getattr(s, "__name__", "symbol"), s)
    k2 = grid.k2
    if s.singular_at_zero:
        safe = k2.copy()
        safe[0, 0] = 1.0
        values = np.asarray(s.symbol(safe), dtype=np.float64).copy()
        values[0, 0] = 0.0
        return values
    return np.broadcast_to(np.asarray(s.symbol(k2), dtype=np.float64), k2.shape).copy()


def apply_multiplier(v: SpectralField, s: Union[Multiplier, Symbol]) -> SpectralField:
    """
    Coefficient-wise product with s evaluated at physical |k|².

    Raises:
        SingularMultiplierError: if s is singular at k=0 and v has a nonzero mean
    """
    if isinstance(s, Multiplier) and s.singular_at_zero and abs(v.zero_mode) > ZERO_MODE_TOLERANCE:
        raise SingularMultiplierError(abs(v.zero_mode))
    return SpectralField(v.grid, v.coeffs * multiplier_array(v.grid, s))


def dealias_mask(grid: GridSpec) -> np.ndarray:
    """2/3-rule mask: keeps integer modes with |k_x|, |k_y| ≤ N/3."""
    keep = np.abs(grid.indices) <= grid.n // 3
    return np.outer(keep, keep)


def dealias(v: SpectralField) -> SpectralField:
    return SpectralField(v.grid, np.where(dealias_mask(v.grid), v.coeffs, 0.0))
