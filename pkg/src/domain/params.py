"""
Validated run parameters.

All models are frozen pydantic models; ``build`` converts pydantic's error
into the project's InvalidParameterError so callers see one exception type.
"""
import math
from typing import Optional, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator, model_validator

from infrastructure.error_handling.exceptions import InvalidParameterError

M = TypeVar("M", bound=BaseModel)

DEFAULT_GRID_N = 128


class Schedule(BaseModel):
    """Phase boundaries and knobs of the minimization protocol."""

    model_config = ConfigDict(frozen=True)

    t1: float = Field(default=40.0, gt=0)
    t2: float = 80.0
    t3: float = 90.0
    t4: float = 100.0
    t5: float = 2500.0
    residual_tol: float = Field(default=1e-8, gt=0)
    rho: float = Field(default=0.1, ge=0, lt=1)
    noise_amplitude_factor: float = Field(default=0.05, ge=0)
    settle_time: float = Field(default=5.0, gt=0)
    refit_repeats: int = Field(default=1, ge=0)
    dealias: bool = False

    @model_validator(mode="after")
    def phases_must_be_ordered(self):
        if not (0 < self.t1 < self.t2 < self.t3 < self.t4 <= self.t5):
            raise ValueError(
                f"phase boundaries must satisfy 0 < t1 < t2 < t3 < t4 <= t5, "
                f"got {self.t1}, {self.t2}, {self.t3}, {self.t4}, {self.t5}"
            )
        return self


class ModelParams(BaseModel):
    """(γ, m) plus discretization and schedule."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=0)
    m: float = Field(gt=-1, lt=1)
    n: int = Field(default=DEFAULT_GRID_N, ge=8)
    length: Optional[float] = Field(default=None, gt=0)
    dt: Optional[float] = Field(default=None, gt=0)
    schedule: Schedule = Field(default_factory=Schedule)

    @field_validator("gamma", "m")
    @classmethod
    def must_be_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @field_validator("n")
    @classmethod
    def n_must_be_even(cls, v):
        if v % 2:
            raise ValueError("grid size must be even")
        return v


class SweepRegion(BaseModel):
    """Rectangle [m_min, m_max] × [gamma_min, gamma_max] of the phase diagram."""

    model_config = ConfigDict(frozen=True)

    m_min: float = Field(gt=-1, lt=1)
    m_max: float = Field(gt=-1, lt=1)
    gamma_min: float = Field(gt=0)
    gamma_max: float = Field(gt=0)

    @model_validator(mode="after")
    def bounds_must_be_ordered(self):
        if self.m_min > self.m_max or self.gamma_min > self.gamma_max:
            raise ValueError("region bounds must satisfy min <= max")
        return self

    @property
    def diameter(self) -> float:
        return math.hypot(self.m_max - self.m_min, self.gamma_max - self.gamma_min)

    def contains(self, m: float, gamma: float, tol: float = 1e-12) -> bool:
        return (self.m_min - tol <= m <= self.m_max + tol) and (self.gamma_min - tol <= gamma <= self.gamma_max + tol)


class WeightParams(BaseModel):
    """Spectral weighting profile parameters."""

    model_config = ConfigDict(frozen=True)

    rho: float = Field(default=0.1, ge=0, lt=1)
    width: float = 5.0
    harmonics: int = 3


def build(model: Type[M], **values) -> M:
    """
    Construct a params model, raising InvalidParameterError on bad input.

    Args:
        model: pydantic model class
        **values: field values

    Returns:
        Validated model instance
    """
    try:
        return model(**values)
    except PydanticValidationError as e:
        first = e.errors()[0]
        name = ".".join(str(p) for p in first.get("loc", ())) or model.__name__
        raise InvalidParameterError(name, first.get("input"), first.get("msg", "")) from e
