"""
Time-stepper state and dispersion relation.
"""
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from domain.fields import GridSpec, RealField
from infrastructure.error_handling.exceptions import InvalidParameterError, MassConstraintError

MEAN_TOLERANCE = 1e-10


class Stepper(str, Enum):
    ETDRK4 = "ETDRK4"
    GRADIENT_STABLE = "GradientStable"


@dataclass(frozen=True)
class SolverState:
    """
    Deviation field ū = u − m with its clock and model parameters.

    A state is immutable; steppers return new states.
    """

    field: RealField
    t: float
    dt: float
    gamma: float
    m: float
    stepper: Stepper = Stepper.ETDRK4

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError("dt", self.dt, "time step must be positive")
        if not self.gamma > 0:
            raise InvalidParameterError("gamma", self.gamma, "must be positive")
        mean = self.field.mean
        if abs(mean) >= MEAN_TOLERANCE:
            raise MassConstraintError(0.0, mean, MEAN_TOLERANCE)

    @property
    def grid(self) -> GridSpec:
        return self.field.grid

    def evolve(self, **changes) -> "SolverState":
        return replace(self, **changes)


@dataclass(frozen=True)
class Dispersion:
    """Linear growth rates of the uniform state: λ(k²) = −k⁴/γ² + (1−3m²)k² − 1."""

    gamma: float
    m: float
    k2_opt: float
    lambda_max: float

    def growth_rate(self, k2):
        k2 = np.asarray(k2, dtype=np.float64)
        rate = -k2 ** 2 / self.gamma ** 2 + (1.0 - 3.0 * self.m ** 2) * k2 - 1.0
        return float(rate) if rate.ndim == 0 else rate
