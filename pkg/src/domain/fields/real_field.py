"""
Real-valued periodic field.
"""
from dataclasses import dataclass

import numpy as np

from domain.fields.grid import GridSpec
from infrastructure.error_handling.exceptions import InvalidGridError, NonFiniteFieldError


@dataclass(frozen=True, eq=False)
class RealField:
    """
    N² real samples at x_ij = (iL/N, jL/N).

    The sample array is copied on construction and made read-only.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != (self.grid.n, self.grid.n):
            raise InvalidGridError(self.grid.n, self.grid.length, f"sample array has shape {values.shape}")
        bad = int(np.count_nonzero(~np.isfinite(values)))
        if bad:
            raise NonFiniteFieldError(bad)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "RealField":
        return cls(grid, np.full((grid.n, grid.n), float(value)))

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def half_range(self) -> float:
        """(max − min)/2."""
        return 0.5 * (self.max - self.min)

    def shifted(self, offset: float) -> "RealField":
        """Field plus a constant."""
        return RealField(self.grid, self.values + offset)

    def deviation(self) -> "RealField":
        """Field minus its own mean."""
        return RealField(self.grid, self.values - self.values.mean())

    def on_grid(self, grid: GridSpec) -> "RealField":
        """Same samples reinterpreted on another box of equal N."""
        if grid.n != self.grid.n:
            raise InvalidGridError(grid.n, grid.length, f"cannot reinterpret N={self.grid.n} samples")
        return RealField(grid, self.values)
