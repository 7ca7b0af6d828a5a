"""
Final-state classification.
"""
from .pattern_classifier import (
    AngularSpectrum,
    Classification,
    angular_spectrum,
    classify,
    classify_field,
    count_peaks,
)

__all__ = [
    "AngularSpectrum",
    "Classification",
    "angular_spectrum",
    "classify",
    "classify_field",
    "count_peaks",
]
