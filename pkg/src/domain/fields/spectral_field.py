"""
Fourier coefficients of a periodic field.
"""
from dataclasses import dataclass

import numpy as np

from domain.fields.grid import GridSpec
from infrastructure.error_handling.exceptions import InvalidGridError, NonFiniteFieldError


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Coefficients v̂_k for integer k ∈ [−N/2, N/2)², stored in numpy FFT order.

    ``coeffs[kx, ky]`` accepts negative integer indices directly.
    """

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if coeffs.shape != (self.grid.n, self.grid.n):
            raise InvalidGridError(self.grid.n, self.grid.length, f"coefficient array has shape {coeffs.shape}")
        bad = int(np.count_nonzero(~np.isfinite(coeffs)))
        if bad:
            raise NonFiniteFieldError(bad)
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def zero_mode(self) -> complex:
        return complex(self.coeffs[0, 0])

    def coefficient(self, kx: int, ky: int) -> complex:
        return complex(self.coeffs[kx, ky])

    def power_excluding_zero(self) -> float:
        """Σ_{k≠0} |v̂_k|²."""
        power = np.abs(self.coeffs) ** 2
        return float(power.sum() - power[0, 0])

    def conjugate_asymmetry(self) -> float:
        """max |v̂_{−k} − conj(v̂_k)|."""
        mirrored = np.roll(np.flip(self.coeffs, axis=(0, 1)), shift=1, axis=(0, 1))
        return float(np.max(np.abs(mirrored - np.conj(self.coeffs))))
