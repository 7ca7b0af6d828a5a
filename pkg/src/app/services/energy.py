"""
Energy evaluation.

Two totals are built from the same three integrals:

* ``E_paper = I1/γ² + I2 + I3``, the reported energy of a state;
* ``E_diss = I1/(2γ²) + I2 + I3/2``, the functional whose H⁻¹ gradient flow is
  the evolution equation, and therefore the one that decreases step to step.

I1 and I3 use Parseval sums; I2 uses the rectangle rule with cell area (L/N)².
"""
import math

import numpy as np

from app.services.spectral_core import INVERSE_NEG_LAPLACIAN, LAPLACIAN, apply_multiplier, forward, inverse, to_physical, to_spectral
from domain.fields import GridSpec, RealField
from domain.records import EnergyBreakdown, OptimalLength
from infrastructure.error_handling.exceptions import InvalidParameterError, MassConstraintError

DEVIATION_MEAN_TOLERANCE = 1e-10
MASS_TOLERANCE = 1e-8
DEGENERATE_TOLERANCE = 1e-14


def _require_mean(field: RealField, expected: float, tolerance: float) -> None:
    mean = field.mean
    if abs(mean - expected) >= tolerance:
        raise MassConstraintError(expected, mean, tolerance)


def _inverse_k2(grid: GridSpec) -> np.ndarray:
    k2 = grid.k2.copy()
    k2[0, 0] = 1.0
    inv = 1.0 / k2
    inv[0, 0] = 0.0
    return inv


def breakdown_from_deviation(deviation_hat: np.ndarray, grid: GridSpec, gamma: float, m: float) -> EnergyBreakdown:
    """
    Energy integrals of u = m + ū from the coefficients of ū.

    Args:
        deviation_hat: Forward transform of ū (zero mode ignored for I1, I3)
        grid: Grid of the coefficients
        gamma: Interaction parameter γ
        m: Mean mass

    Returns:
        EnergyBreakdown on the physical box
    """
    power = np.abs(deviation_hat) ** 2
    area = grid.area
    i1 = area * float(np.sum(grid.k2 * power))
    i3 = area * float(np.sum(power * _inverse_k2(grid)))
    u = m + to_physical(deviation_hat)
    i2 = grid.cell_area * float(np.sum((1.0 - u ** 2) ** 2)) / 4.0
    return EnergyBreakdown(
        i1=i1,
        i2=i2,
        i3=i3,
        e_paper=i1 / gamma ** 2 + i2 + i3,
        e_diss=i1 / (2.0 * gamma ** 2) + i2 + 0.5 * i3,
        area=area,
    )


def nonlocal_energy(v: RealField) -> float:
    """
    ∫ v φ dx with −Δφ = v and φ mean-zero.

    Raises:
        MassConstraintError: if |mean(v)| ≥ 1e-10
    """
    _require_mean(v, 0.0, DEVIATION_MEAN_TOLERANCE)
    power = np.abs(to_spectral(v.values)) ** 2
    return v.grid.area * float(np.sum(power * _inverse_k2(v.grid)))


def total_energy(u: RealField, gamma: float, m: float) -> EnergyBreakdown:
    """Energy breakdown of u, whose mean must equal m within 1e-8."""
    _require_mean(u, m, MASS_TOLERANCE)
    return breakdown_from_deviation(to_spectral(u.values - m), u.grid, gamma, m)


def dissipated_energy(deviation: RealField, gamma: float, m: float) -> float:
    """E_diss of u = m + ū for mean-zero ū."""
    _require_mean(deviation, 0.0, DEVIATION_MEAN_TOLERANCE)
    return breakdown_from_deviation(to_spectral(deviation.values), deviation.grid, gamma, m).e_diss


def chemical_potential(deviation: RealField, gamma: float, m: float) -> RealField:
    """μ = −(1/γ²)Δū + (ū+m)³ − (ū+m) + (−Δ)⁻¹ū, the L² gradient of E_diss."""
    _require_mean(deviation, 0.0, DEVIATION_MEAN_TOLERANCE)
    spectrum = forward(deviation)
    gradient_part = inverse(apply_multiplier(spectrum, LAPLACIAN)).values * (-1.0 / gamma ** 2)
    nonlocal_part = inverse(apply_multiplier(spectrum, INVERSE_NEG_LAPLACIAN)).values
    u = deviation.values + m
    return RealField(deviation.grid, gradient_part + u ** 3 - u + nonlocal_part)


def l2_inner(f: RealField, g: RealField) -> float:
    """⟨f, g⟩ = (L/N)² Σ f g."""
    return f.grid.cell_area * float(np.sum(f.values * g.values))


def rescaled_energy(length: float, i1: float, i2: float, i3: float, gamma: float) -> float:
    """
    Ẽ(L) = I1/(L²γ²) + I2 + L²·I3 for unit-domain integrals.

    Raises:
        InvalidParameterError: if L ≤ 0
    """
    if not length > 0:
        raise InvalidParameterError("length", length, "must be positive")
    return i1 / (length ** 2 * gamma ** 2) + i2 + length ** 2 * i3


def optimal_length(i1: float, i3: float, gamma: float, i2: float = 0.0) -> OptimalLength:
    """
    L* = (I1/(γ²I3))^{1/4} and Ẽ(L*) = 2√(I1·I3)/γ + I2.

    Degenerate (no finite optimum) when I1 or I3 vanish.
    """
    if not (i1 > DEGENERATE_TOLERANCE and i3 > DEGENERATE_TOLERANCE):
        return OptimalLength(length=None, energy=None, degenerate=True)
    length = (i1 / (gamma ** 2 * i3)) ** 0.25
    return OptimalLength(length=length, energy=rescaled_energy(length, i1, i2, i3, gamma))


def unit_domain_integrals(breakdown: EnergyBreakdown, length: float) -> tuple:
    """(I1, I2, I3) of the same samples viewed on the unit box."""
    return breakdown.i1, breakdown.i2 / length ** 2, breakdown.i3 / length ** 4


def optimal_wavenumber(gamma: float) -> float:
    """Wavenumber minimizing the weak single-mode energy: k² = γ."""
    if not gamma > 0:
        raise InvalidParameterError("gamma", gamma, "must be positive")
    return math.sqrt(gamma)
