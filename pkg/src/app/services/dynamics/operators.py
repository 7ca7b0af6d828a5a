"""
Right-hand side of the H⁻¹ flow, its Jacobian, dispersion and time-step rules.

ū_t = −(1/γ²)Δ²ū + Δ(ū³ + 3mū² − (1−3m²)ū) − ū

The linear part is diagonal in Fourier space with symbol
λ(k²) = −k⁴/γ² + (1−3m²)k² − 1; the remaining nonlinear part is
Δ(ū³ + 3mū²).
"""
import math

import numpy as np

from app.services.spectral_core import to_physical, to_spectral
from domain.fields import GridSpec, RealField
from domain.solver_state import Dispersion
from infrastructure.error_handling.exceptions import InvalidParameterError, MassConstraintError

DT_MAX = 10.0
MEAN_TOLERANCE = 1e-10

# adapt_dt thresholds on fixed-point iterations
SLOW_ITERATIONS = 20
FAST_ITERATIONS = 5


def _require_mean_zero(field: RealField) -> None:
    mean = field.mean
    if abs(mean) >= MEAN_TOLERANCE:
        raise MassConstraintError(0.0, mean, MEAN_TOLERANCE)


def dispersion(gamma: float, m: float) -> Dispersion:
    if not gamma > 0:
        raise InvalidParameterError("gamma", gamma, "must be positive")
    s = 1.0 - 3.0 * m ** 2
    return Dispersion(
        gamma=gamma,
        m=m,
        k2_opt=gamma ** 2 * s / 2.0,
        lambda_max=gamma ** 2 * s ** 2 / 4.0 - 1.0,
    )


def linear_symbol(grid: GridSpec, gamma: float, m: float) -> np.ndarray:
    k2 = grid.k2
    return -k2 ** 2 / gamma ** 2 + (1.0 - 3.0 * m ** 2) * k2 - 1.0


def nonlinear_spectrum(deviation_hat: np.ndarray, grid: GridSpec, m: float, mask=None) -> np.ndarray:
    """Coefficients of Δ(ū³ + 3mū²), zero mode exactly 0."""
    u = to_physical(deviation_hat)
    product = to_spectral(u ** 3 + 3.0 * m * u ** 2)
    if mask is not None:
        product = product * mask
    result = -grid.k2 * product
    result[0, 0] = 0.0
    return result


def rhs_spectrum(deviation_hat: np.ndarray, grid: GridSpec, gamma: float, m: float) -> np.ndarray:
    result = linear_symbol(grid, gamma, m) * deviation_hat + nonlinear_spectrum(deviation_hat, grid, m)
    result[0, 0] = 0.0
    return result


def residual_norm_spectrum(deviation_hat: np.ndarray, grid: GridSpec, gamma: float, m: float) -> float:
    """Grid RMS of the right-hand side, via Parseval."""
    return math.sqrt(float(np.sum(np.abs(rhs_spectrum(deviation_hat, grid, gamma, m)) ** 2)))


def rhs(deviation: RealField, gamma: float, m: float) -> RealField:
    """Evaluate u_t pseudo-spectrally; the result is mean-zero."""
    _require_mean_zero(deviation)
    return RealField(deviation.grid, to_physical(rhs_spectrum(to_spectral(deviation.values), deviation.grid, gamma, m)))


def residual_norm(deviation: RealField, gamma: float, m: float) -> float:
    """‖u_t‖₂ as the root-mean-square over grid points."""
    _require_mean_zero(deviation)
    return residual_norm_spectrum(to_spectral(deviation.values), deviation.grid, gamma, m)


def jacobian_apply(deviation: RealField, v: RealField, gamma: float, m: float) -> RealField:
    """J(ū)v = −(1/γ²)Δ²v + Δ((3ū² + 6mū − (1−3m²))v) − v."""
    _require_mean_zero(v)
    return RealField(v.grid, jacobian_apply_values(deviation.values, v.values, v.grid, gamma, m))


def jacobian_apply_values(u: np.ndarray, v: np.ndarray, grid: GridSpec, gamma: float, m: float) -> np.ndarray:
    """Array form of jacobian_apply used by the Krylov solver."""
    k2 = grid.k2
    coefficient = 3.0 * u ** 2 + 6.0 * m * u - (1.0 - 3.0 * m ** 2)
    v_hat = to_spectral(v)
    result = -(k2 ** 2 / gamma ** 2) * v_hat - k2 * to_spectral(coefficient * v) - v_hat
    return to_physical(result)


def default_dt(gamma: float) -> float:
    """Δt = 0.1/(1 + γ^{3/2})."""
    if not gamma > 0:
        raise InvalidParameterError("gamma", gamma, "must be positive")
    return 0.1 / (1.0 + gamma ** 1.5)


def adapt_dt(iterations: int, dt: float) -> float:
    """Halve after slow fixed-point solves, grow by 1.5 (capped at 10) after fast ones."""
    if not dt > 0:
        raise InvalidParameterError("dt", dt, "must be positive")
    if iterations > SLOW_ITERATIONS:
        return dt / 2.0
    if iterations < FAST_ITERATIONS:
        return min(1.5 * dt, DT_MAX)
    return dt
