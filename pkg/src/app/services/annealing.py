"""
Spectral weighting and noise injection for escaping metastable states.

The weighting profile

    w(k) = (1−ρ) + ρ Σ_{n=1..3} exp(−5(n − |k|/k*)²)

keeps modes near the dominant wavenumber k* and its first two harmonics and
damps everything else by about (1−ρ) per application.
"""
import logging
from typing import Optional, Union

import numpy as np

from domain.fields import GridSpec, RealField, SpectralField
from domain.params import WeightParams, build
from infrastructure.error_handling.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12
BAND_HALF_WIDTH = 0.2


def dominant_mode(v: SpectralField) -> Optional[float]:
    """
    Physical |k| of the largest-magnitude nonzero mode.

    Ties (within 1e-12 relative) go to the smallest |k|. Returns None when the
    spectrum vanishes outside the zero mode.
    """
    magnitudes = np.abs(v.coeffs)
    magnitudes[0, 0] = 0.0
    top = float(magnitudes.max())
    if top <= 0.0:
        return None
    candidates = magnitudes >= top * (1.0 - TIE_TOLERANCE)
    return float(v.grid.kmag[candidates].min())


def weight(kmag, k_star: float, rho: float):
    """Weighting profile evaluated at |k| (scalar or array)."""
    if not k_star > 0:
        raise InvalidParameterError("k_star", k_star, "must be positive")
    params = build(WeightParams, rho=rho)
    ratio = np.asarray(kmag, dtype=np.float64) / k_star
    peaks = sum(np.exp(-params.width * (n - ratio) ** 2) for n in range(1, params.harmonics + 1))
    result = (1.0 - params.rho) + params.rho * peaks
    return float(result) if result.ndim == 0 else result


def weighting_multiplier(grid: GridSpec, k_star: float, rho: float) -> np.ndarray:
    """Profile on the grid with the zero mode left at 1."""
    w = weight(grid.kmag, k_star, rho)
    w[0, 0] = 1.0
    return w


def apply_weighting(v: SpectralField, k_star: float, rho: float) -> SpectralField:
    return SpectralField(v.grid, v.coeffs * weighting_multiplier(v.grid, k_star, rho))


def concentration_ratio(v: SpectralField, k_star: float, band: float = BAND_HALF_WIDTH) -> float:
    """Share of nonzero-mode power with |k/k* − 1| < band."""
    power = np.abs(v.coeffs) ** 2
    power[0, 0] = 0.0
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    in_band = np.abs(v.grid.kmag / k_star - 1.0) < band
    return float(power[in_band].sum()) / total


def inject_noise(deviation: RealField, amplitude: float, seed: Union[int, np.random.Generator]) -> RealField:
    """
    Add i.i.d. uniform noise in [−amplitude, amplitude] with its mean removed.

    Args:
        deviation: Field to perturb
        amplitude: Noise half-width, ≥ 0
        seed: Integer seed or an existing Generator owned by the run

    Returns:
        Perturbed field with the same mean
    """
    if not amplitude >= 0:
        raise InvalidParameterError("amplitude", amplitude, "must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    noise = rng.uniform(-amplitude, amplitude, size=deviation.values.shape)
    noise -= noise.mean()
    return RealField(deviation.grid, deviation.values + noise)
