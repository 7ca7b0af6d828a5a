"""
Periodic square grid bookkeeping.
"""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from infrastructure.error_handling.exceptions import InvalidGridError


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class GridSpec:
    """
    N×N periodic grid on the box [0, L]².

    Axis 0 is x, axis 1 is y. Wavevector arrays follow numpy FFT ordering, so
    integer index k sits at position k mod N.
    """

    n: int
    length: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise InvalidGridError(self.n, self.length, "N must be an integer")
        if self.n < 8 or self.n % 2:
            raise InvalidGridError(self.n, self.length, "N must be even and at least 8")
        if not math.isfinite(self.length) or self.length <= 0:
            raise InvalidGridError(self.n, self.length, "L must be positive and finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    @property
    def area(self) -> float:
        return self.length ** 2

    @property
    def fundamental(self) -> float:
        """Physical wavenumber of integer index 1."""
        return 2.0 * math.pi / self.length

    @cached_property
    def indices(self) -> np.ndarray:
        """Integer wavevector components in FFT order, in [−N/2, N/2)."""
        return _frozen(np.fft.fftfreq(self.n, d=1.0 / self.n).round().astype(np.int64))

    @cached_property
    def kx(self) -> np.ndarray:
        kx, _ = np.meshgrid(self.indices * self.fundamental, self.indices * self.fundamental, indexing="ij")
        return _frozen(kx)

    @cached_property
    def ky(self) -> np.ndarray:
        _, ky = np.meshgrid(self.indices * self.fundamental, self.indices * self.fundamental, indexing="ij")
        return _frozen(ky)

    @cached_property
    def k2(self) -> np.ndarray:
        """Physical |k|²."""
        return _frozen(self.kx ** 2 + self.ky ** 2)

    @cached_property
    def kmag(self) -> np.ndarray:
        return _frozen(np.sqrt(self.k2))

    @cached_property
    def coordinates(self) -> tuple:
        """Sample positions (x, y), each N×N."""
        axis = np.arange(self.n) * self.spacing
        x, y = np.meshgrid(axis, axis, indexing="ij")
        return _frozen(x), _frozen(y)

    def with_length(self, length: float) -> "GridSpec":
        """Same sample count on a box of a different size."""
        return GridSpec(self.n, length)
