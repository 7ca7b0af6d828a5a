"""
Pattern classifier based on the angular distribution of spectral power.

Classifies:
- Disorder: no power outside the zero mode
- Lamellae: 2 peaks (one wavevector pair)
- HexSpots: 6 peaks (three pairs at π/3)
- SquareSpots: 4 peaks (two orthogonal pairs)
- Mixed: anything else
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import find_peaks

from app.services.annealing import dominant_mode
from app.services.spectral_core import forward
from domain.fields import RealField, SpectralField
from domain.phase_label import PhaseLabel
from infrastructure.error_handling.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

ANGLES = 720
PEAK_FRACTION = 0.5
WIDTH_FACTOR = 0.2
DISORDER_POWER = 1e-8
# Modes farther than this many Gaussian widths from the annulus contribute < e^-36.
CUTOFF_WIDTHS = 6.0
ANGLE_CHUNK = 90

LABELS_BY_PEAKS = {
    2: PhaseLabel.LAMELLAE,
    4: PhaseLabel.SQUARE_SPOTS,
    6: PhaseLabel.HEX_SPOTS,
}


@dataclass(frozen=True)
class AngularSpectrum:
    theta: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class Classification:
    label: PhaseLabel
    peaks: int
    k_star: Optional[float]


def angular_spectrum(v: SpectralField, k_star: float, epsilon: Optional[float] = None, angles: int = ANGLES) -> AngularSpectrum:
    """
    g(θ) = Σ_{k≠0} exp(−|k − (sin θ, cos θ)k*|²/ε)·|v̂_k| on θ_i = 2πi/M.

    Args:
        v: Spectrum of the field
        k_star: Annulus radius, > 0
        epsilon: Gaussian width; defaults to (0.2·k*)²
        angles: Number of samples M

    Returns:
        AngularSpectrum
    """
    if not k_star > 0:
        raise InvalidParameterError("k_star", k_star, "must be positive")
    if epsilon is None:
        epsilon = (WIDTH_FACTOR * k_star) ** 2
    if not epsilon > 0:
        raise InvalidParameterError("epsilon", epsilon, "must be positive")

    grid = v.grid
    magnitudes = np.abs(v.coeffs)
    near = np.abs(grid.kmag - k_star) <= CUTOFF_WIDTHS * math.sqrt(epsilon)
    near[0, 0] = False
    kx = grid.kx[near]
    ky = grid.ky[near]
    weights = magnitudes[near]

    theta = 2.0 * np.pi * np.arange(angles) / angles
    values = np.zeros(angles)
    for start in range(0, angles, ANGLE_CHUNK):
        chunk = theta[start:start + ANGLE_CHUNK]
        dx = kx[None, :] - np.sin(chunk)[:, None] * k_star
        dy = ky[None, :] - np.cos(chunk)[:, None] * k_star
        values[start:start + ANGLE_CHUNK] = np.exp(-(dx ** 2 + dy ** 2) / epsilon) @ weights
    return AngularSpectrum(theta, values)


def count_peaks(g, fraction: float = PEAK_FRACTION) -> int:
    """
    Local maxima of the periodic sequence g above fraction·max(g).

    Plateaus count once; a constant sequence has no peaks.
    """
    if not 0.0 < fraction < 1.0:
        raise InvalidParameterError("fraction", fraction, "must lie in (0, 1)")
    g = np.asarray(g, dtype=np.float64)
    top = float(g.max())
    if top - float(g.min()) <= 1e-14 * max(abs(top), 1.0):
        return 0
    rolled = np.roll(g, -int(np.argmin(g)))
    peaks, _ = find_peaks(rolled, height=fraction * top)
    return int(len(peaks))


def classify_field(deviation: RealField, fraction: float = PEAK_FRACTION) -> Classification:
    """Label, peak count and dominant wavenumber of a field."""
    spectrum = forward(deviation.deviation())
    n = deviation.grid.n
    power = spectrum.power_excluding_zero()
    if n ** 4 * power < DISORDER_POWER * n ** 2:
        return Classification(PhaseLabel.DISORDER, 0, None)

    k_star = dominant_mode(spectrum)
    if k_star is None:
        return Classification(PhaseLabel.DISORDER, 0, None)

    g = angular_spectrum(spectrum, k_star)
    peaks = count_peaks(g.values, fraction)
    label = LABELS_BY_PEAKS.get(peaks, PhaseLabel.MIXED)
    logger.debug(f"Classified as {label.value}: {peaks} peaks at k*={k_star:.4f}")
    return Classification(label, peaks, k_star)


def classify(deviation: RealField) -> PhaseLabel:
    return classify_field(deviation).label
