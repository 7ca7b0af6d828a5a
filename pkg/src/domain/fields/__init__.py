"""
Grid and field value types.
"""
from .grid import GridSpec
from .real_field import RealField
from .spectral_field import SpectralField

__all__ = ["GridSpec", "RealField", "SpectralField"]
