"""
Center-manifold amplitude types.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from infrastructure.error_handling.exceptions import InvalidParameterError


class PatternFamily(str, Enum):
    """Fixed-point families of the amplitude system"""
    DISORDER = "Disorder"
    LAMELLAE = "Lamellae"
    TRIANGULAR_SPOTS = "TriangularSpots"
    HEX_SPOTS = "HexSpots"
    AB_NOT_C = "ABnotC"


@dataclass(frozen=True)
class AmplitudeState:
    """Amplitudes (a, b, c) of the three marginal modes at rescaled mass β."""

    a: float
    b: float
    c: float
    beta: float

    def __post_init__(self):
        for name in ("a", "b", "c", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(name, getattr(self, name), "must be finite")
        if self.beta < 0:
            raise InvalidParameterError("beta", self.beta, "must be non-negative")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=np.float64)

    @classmethod
    def from_array(cls, values, beta: float) -> "AmplitudeState":
        a, b, c = (float(v) for v in values)
        return cls(a, b, c, beta)


@dataclass(frozen=True)
class FixedPointFamily:
    """One family of fixed points with its representatives."""

    label: PatternFamily
    representatives: Tuple[Tuple[float, float, float], ...]
    notes: str = ""


@dataclass(frozen=True)
class StabilityRegions:
    """
    β-intervals (lo, hi) per pattern; hi may be math.inf.

    ``linear`` holds regions of linear stability, ``global_`` regions where
    the pattern has the lowest Lyapunov value among stable states.
    """

    linear: Dict[PatternFamily, Tuple[float, float]] = field(default_factory=dict)
    global_: Dict[PatternFamily, Tuple[float, float]] = field(default_factory=dict)

    def thresholds(self) -> Tuple[float, ...]:
        """The six boundaries in reporting order."""
        return (
            self.linear[PatternFamily.LAMELLAE][1],
            self.linear[PatternFamily.HEX_SPOTS][0],
            self.linear[PatternFamily.HEX_SPOTS][1],
            self.linear[PatternFamily.DISORDER][0],
            self.global_[PatternFamily.LAMELLAE][1],
            self.global_[PatternFamily.HEX_SPOTS][1],
        )

    def linearly_stable(self, beta: float) -> Tuple[PatternFamily, ...]:
        """Patterns linearly stable at β."""
        return tuple(label for label, (lo, hi) in self.linear.items() if lo <= beta < hi)

    def global_minimizer(self, beta: float) -> Optional[PatternFamily]:
        for label, (lo, hi) in self.global_.items():
            if lo <= beta < hi:
                return label
        return None
