"""
Center-manifold analysis near the order-disorder transition.

Near γ = 2/(1−3m²) the deviation is, to leading order,
ū ≈ m*(γ)·(aφ₁ + bφ₂ + cφ₃) with φ_i = √2 cos(k_i·x) and

    k₁ = (√2, 0),  k₂ = (−1/√2, √(3/2)),  k₃ = (−1/√2, −√(3/2)).

The amplitudes follow the gradient flow ȧ = −∂V/∂a (cyclic in a, b, c) of

    V = −3(1−β²)(a²+b²+c²) + 6√2βabc + 3(a²b²+b²c²+a²c²) + ¾(a⁴+b⁴+c⁴)

with β = m/m*(γ). Amplitude time is rescaled by (m*)² and never mixed with
PDE time.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from domain.amplitude import AmplitudeState, FixedPointFamily, PatternFamily, StabilityRegions
from domain.fields import GridSpec, RealField
from infrastructure.error_handling.exceptions import IncommensurateBoxError, InvalidParameterError

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

LAMELLAR_LINEAR_LIMIT = 1.0 / math.sqrt(5.0)
HEX_LINEAR_ONSET = 1.0 / math.sqrt(17.0)
HEX_EXISTENCE_LIMIT = math.sqrt(5.0) / 2.0
DISORDER_LINEAR_ONSET = 1.0
LAMELLAR_HEX_GLOBAL = math.sqrt(551.0 - 174.0 * math.sqrt(6.0)) / 29.0
HEX_DISORDER_GLOBAL = 3.0 * math.sqrt(5.0 / 37.0)

# Largest relative |k| error accepted when snapping hexagonal wavevectors to the grid.
SNAP_TOLERANCE = 0.02


def odt(gamma: float) -> float:
    """m*(γ) = √((γ−2)/(3γ)), defined for γ ≥ 2."""
    if not gamma >= 2.0:
        raise InvalidParameterError("gamma", gamma, "the ODT mass is defined for gamma >= 2")
    return math.sqrt((gamma - 2.0) / (3.0 * gamma))


def odt_inverse(m: float) -> float:
    """γ*(m) = 2/(1−3m²), defined for 3m² < 1."""
    if not 3.0 * m ** 2 < 1.0:
        raise InvalidParameterError("m", m, "requires 3m^2 < 1")
    return 2.0 / (1.0 - 3.0 * m ** 2)


def rescaled_mass(gamma: float, m: float) -> float:
    """β = |m|/m*(γ); NaN at or below the ODT point γ = 2."""
    if gamma <= 2.0:
        return math.nan
    return abs(m) / odt(gamma)


def _rhs(values: np.ndarray, beta: float) -> np.ndarray:
    a, b, c = values
    s = 6.0 * (1.0 - beta ** 2)
    t = 6.0 * SQRT2 * beta
    return np.array([
        s * a - t * b * c - 6.0 * (b ** 2 + c ** 2) * a - 3.0 * a ** 3,
        s * b - t * a * c - 6.0 * (a ** 2 + c ** 2) * b - 3.0 * b ** 3,
        s * c - t * a * b - 6.0 * (a ** 2 + b ** 2) * c - 3.0 * c ** 3,
    ])


def _lyapunov(values: np.ndarray, beta: float) -> float:
    a, b, c = values
    return float(
        -3.0 * (1.0 - beta ** 2) * (a ** 2 + b ** 2 + c ** 2)
        + 6.0 * SQRT2 * beta * a * b * c
        + 3.0 * (a ** 2 * b ** 2 + b ** 2 * c ** 2 + a ** 2 * c ** 2)
        + 0.75 * (a ** 4 + b ** 4 + c ** 4)
    )


def _gradient(values: np.ndarray, beta: float) -> np.ndarray:
    a, b, c = values
    s = 6.0 * (1.0 - beta ** 2)
    t = 6.0 * SQRT2 * beta
    return np.array([
        -s * a + t * b * c + 6.0 * a * (b ** 2 + c ** 2) + 3.0 * a ** 3,
        -s * b + t * a * c + 6.0 * b * (a ** 2 + c ** 2) + 3.0 * b ** 3,
        -s * c + t * a * b + 6.0 * c * (a ** 2 + b ** 2) + 3.0 * c ** 3,
    ])


def _hessian(values: np.ndarray, beta: float) -> np.ndarray:
    a, b, c = values
    s = 6.0 * (1.0 - beta ** 2)
    t = 6.0 * SQRT2 * beta
    return np.array([
        [-s + 6.0 * (b ** 2 + c ** 2) + 9.0 * a ** 2, t * c + 12.0 * a * b, t * b + 12.0 * a * c],
        [t * c + 12.0 * a * b, -s + 6.0 * (a ** 2 + c ** 2) + 9.0 * b ** 2, t * a + 12.0 * b * c],
        [t * b + 12.0 * a * c, t * a + 12.0 * b * c, -s + 6.0 * (a ** 2 + b ** 2) + 9.0 * c ** 2],
    ])


def amplitude_rhs(s: AmplitudeState) -> Tuple[float, float, float]:
    da, db, dc = _rhs(s.amplitudes, s.beta)
    return float(da), float(db), float(dc)


def lyapunov(s: AmplitudeState) -> float:
    return _lyapunov(s.amplitudes, s.beta)


def gradient_consistency(s: AmplitudeState) -> float:
    """max |amplitude_rhs + ∇V|; zero when the flow is exactly −∇V."""
    return float(np.max(np.abs(_rhs(s.amplitudes, s.beta) + _gradient(s.amplitudes, s.beta))))


def hessian_eigs(s: AmplitudeState) -> Tuple[float, float, float]:
    """Eigenvalues of the Hessian of V at s, ascending."""
    eigs = np.linalg.eigvalsh(_hessian(s.amplitudes, s.beta))
    return float(eigs[0]), float(eigs[1]), float(eigs[2])


def hex_amplitudes(beta: float) -> Optional[Tuple[float, float]]:
    """
    Both roots ā = −(√2/5)(β ± √(5−4β²)) of the hexagonal family.

    Returns None for β > √5/2, where the family does not exist.
    """
    discriminant = 5.0 - 4.0 * beta ** 2
    if discriminant < 0.0:
        return None
    root = math.sqrt(discriminant)
    return -(SQRT2 / 5.0) * (beta + root), -(SQRT2 / 5.0) * (beta - root)


def stable_hex_amplitude(beta: float) -> Optional[float]:
    """The hexagonal root whose smallest Hessian eigenvalue is larger."""
    roots = hex_amplitudes(beta)
    if roots is None:
        return None
    return max(roots, key=lambda a: hessian_eigs(AmplitudeState(a, a, a, beta))[0])


def _with_signs(a: float, b: float, c: float) -> List[Tuple[float, float, float]]:
    """(a, b, c) and the sign flips of two entries, which leave abc unchanged."""
    variants = [(a, b, c), (a, -b, -c), (-a, b, -c), (-a, -b, c)]
    unique = []
    for v in variants:
        if v not in unique:
            unique.append(v)
    return unique


def fixed_points(beta: float) -> List[FixedPointFamily]:
    """
    Fixed-point families of the amplitude system at β.

    Families outside their β-domain are omitted; the always-present
    Disorder family (first in the list) notes which ones.
    """
    if not beta >= 0:
        raise InvalidParameterError("beta", beta, "must be non-negative")

    families = [FixedPointFamily(PatternFamily.DISORDER, ((0.0, 0.0, 0.0),), "always present")]
    omitted = []

    if beta < 1.0:
        a = math.sqrt(2.0 * (1.0 - beta ** 2))
        reps = tuple(r for sign in (1.0, -1.0) for r in ((sign * a, 0.0, 0.0), (0.0, sign * a, 0.0), (0.0, 0.0, sign * a)))
        families.append(FixedPointFamily(PatternFamily.LAMELLAE, reps, "one nonzero amplitude, six copies"))
    else:
        omitted.append("Lamellae (beta >= 1)")

    if beta == 0.0:
        a = math.sqrt(2.0 / 3.0)
        reps = tuple(r for sign in (1.0, -1.0) for r in ((sign * a, sign * a, 0.0), (sign * a, 0.0, sign * a), (0.0, sign * a, sign * a)))
        families.append(FixedPointFamily(
            PatternFamily.TRIANGULAR_SPOTS, reps,
            "two equal amplitudes; the third equation forces beta = 0"
        ))
    else:
        omitted.append("TriangularSpots (fixed point only at beta = 0)")

    roots = hex_amplitudes(beta)
    if roots is not None:
        stable = stable_hex_amplitude(beta)
        ordered = (stable,) + tuple(r for r in roots if r != stable)
        reps = tuple(v for a in ordered for v in _with_signs(a, a, a))
        families.append(FixedPointFamily(
            PatternFamily.HEX_SPOTS, reps,
            "equal amplitudes; first four representatives use the root with the larger smallest Hessian eigenvalue"
        ))
    else:
        omitted.append("HexSpots (beta > sqrt(5)/2)")

    if 5.0 * beta ** 2 < 1.0:
        a = math.sqrt(2.0 * (1.0 - 5.0 * beta ** 2) / 3.0)
        c = 2.0 * SQRT2 * beta
        reps = tuple(
            v
            for base in ((a, a, -c), (a, -c, a), (-c, a, a))
            for v in _with_signs(*base)
        )
        families.append(FixedPointFamily(PatternFamily.AB_NOT_C, reps, "|a| = |b| != |c|, twelve copies"))
    else:
        omitted.append("ABnotC (beta >= 1/sqrt(5))")

    if omitted:
        origin = families[0]
        families[0] = FixedPointFamily(origin.label, origin.representatives, f"{origin.notes}; omitted: {', '.join(omitted)}")
    return families


def stability_regions() -> StabilityRegions:
    """Closed-form β-intervals of linear and global stability."""
    return StabilityRegions(
        linear={
            PatternFamily.LAMELLAE: (0.0, LAMELLAR_LINEAR_LIMIT),
            PatternFamily.HEX_SPOTS: (HEX_LINEAR_ONSET, HEX_EXISTENCE_LIMIT),
            PatternFamily.DISORDER: (DISORDER_LINEAR_ONSET, math.inf),
        },
        global_={
            PatternFamily.LAMELLAE: (0.0, LAMELLAR_HEX_GLOBAL),
            PatternFamily.HEX_SPOTS: (LAMELLAR_HEX_GLOBAL, HEX_DISORDER_GLOBAL),
            PatternFamily.DISORDER: (HEX_DISORDER_GLOBAL, math.inf),
        },
    )


@dataclass(frozen=True)
class LandscapePoint:
    """V and smallest Hessian eigenvalue of the three stable-candidate families at one β."""

    beta: float
    v_disorder: float
    min_eig_disorder: float
    v_lamellae: float
    min_eig_lamellae: float
    v_hex: float
    min_eig_hex: float


def landscape(betas: Sequence[float]) -> List[LandscapePoint]:
    """Sample the Lyapunov landscape; absent families get NaN."""
    points = []
    for beta in betas:
        beta = float(beta)
        origin = AmplitudeState(0.0, 0.0, 0.0, beta)

        if beta < 1.0:
            lam = AmplitudeState(math.sqrt(2.0 * (1.0 - beta ** 2)), 0.0, 0.0, beta)
            v_lam, eig_lam = lyapunov(lam), hessian_eigs(lam)[0]
        else:
            v_lam, eig_lam = math.nan, math.nan

        a_hex = stable_hex_amplitude(beta)
        if a_hex is not None:
            hexagonal = AmplitudeState(a_hex, a_hex, a_hex, beta)
            v_hex, eig_hex = lyapunov(hexagonal), hessian_eigs(hexagonal)[0]
        else:
            v_hex, eig_hex = math.nan, math.nan

        points.append(LandscapePoint(
            beta=beta,
            v_disorder=lyapunov(origin),
            min_eig_disorder=hessian_eigs(origin)[0],
            v_lamellae=v_lam,
            min_eig_lamellae=eig_lam,
            v_hex=v_hex,
            min_eig_hex=eig_hex,
        ))
    return points


def scan_thresholds(beta_max: float = 1.3, step: float = 1e-4) -> Tuple[float, ...]:
    """
    Recover the six thresholds by brute force on a β grid.

    Stability is read from the sign of the smallest Hessian eigenvalue and the
    global winner from the lowest V among linearly stable families. Each
    threshold is the midpoint of the grid interval where the indicator flips.
    """
    betas = np.arange(0.0, beta_max + step / 2.0, step)
    points = landscape(betas)

    def stable(eig: float) -> bool:
        return math.isfinite(eig) and eig > 0.0

    lam_stable = np.array([stable(p.min_eig_lamellae) for p in points])
    hex_stable = np.array([stable(p.min_eig_hex) for p in points])
    dis_stable = np.array([stable(p.min_eig_disorder) for p in points])

    def winner(p: LandscapePoint) -> str:
        candidates = {"disorder": p.v_disorder if stable(p.min_eig_disorder) else math.inf}
        if stable(p.min_eig_lamellae):
            candidates["lamellae"] = p.v_lamellae
        if stable(p.min_eig_hex):
            candidates["hex"] = p.v_hex
        return min(candidates, key=candidates.get)

    winners = [winner(p) for p in points]

    def flips(indicator) -> List[float]:
        edges = np.flatnonzero(np.diff(np.asarray(indicator, dtype=np.int8)))
        return [float(betas[i] + step / 2.0) for i in edges]

    hex_edges = flips(hex_stable)
    lam_to_hex = next(
        betas[i] + step / 2.0 for i in range(len(winners) - 1)
        if winners[i] == "lamellae" and winners[i + 1] == "hex"
    )
    hex_to_disorder = next(
        betas[i] + step / 2.0 for i in range(len(winners) - 1)
        if winners[i] == "hex" and winners[i + 1] == "disorder"
    )
    return (
        flips(lam_stable)[0],
        hex_edges[0],
        hex_edges[-1],
        flips(dis_stable)[0],
        float(lam_to_hex),
        float(hex_to_disorder),
    )


@dataclass(frozen=True)
class AmplitudeTrajectory:
    times: np.ndarray
    amplitudes: np.ndarray
    lyapunov: np.ndarray
    beta: float

    @property
    def final(self) -> AmplitudeState:
        return AmplitudeState.from_array(self.amplitudes[-1], self.beta)


def amplitude_flow(s0: AmplitudeState, duration: float, samples: int = 201) -> AmplitudeTrajectory:
    """
    Integrate the amplitude system from s0 over [0, duration].

    Args:
        s0: Initial amplitudes and β
        duration: Rescaled time horizon, > 0
        samples: Number of output samples (including both ends)

    Returns:
        AmplitudeTrajectory with V evaluated at every sample
    """
    if not duration > 0:
        raise InvalidParameterError("duration", duration, "must be positive")
    beta = s0.beta
    times = np.linspace(0.0, duration, samples)
    solution = solve_ivp(
        lambda _t, y: _rhs(y, beta),
        (0.0, duration),
        s0.amplitudes,
        method="RK45",
        t_eval=times,
        rtol=1e-10,
        atol=1e-12,
    )
    if not solution.success:
        logger.warning(f"Amplitude flow integration stopped early: {solution.message}")
    amplitudes = solution.y.T
    values = np.array([_lyapunov(row, beta) for row in amplitudes])
    return AmplitudeTrajectory(solution.t, amplitudes, values, beta)


def hexagonal_wavevectors(grid: GridSpec) -> Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]:
    """
    Integer grid wavevectors closest to k₁, k₂, k₃.

    Raises:
        IncommensurateBoxError: if L is not an even multiple of √2π or the
            snapped k₂, k₃ miss |k| = √2 by more than 2 %
    """
    periods = grid.length / (SQRT2 * math.pi)
    n = round(periods)
    if n < 1 or abs(periods - n) > 1e-9 * max(1.0, periods):
        raise IncommensurateBoxError(grid.length, "L must be an integer multiple of sqrt(2)*pi")
    if n % 2:
        raise IncommensurateBoxError(grid.length, "hexagonal modes need an even multiple of sqrt(2)*pi")
    j = round(n * math.sqrt(3.0) / 2.0)
    snapped = math.hypot(n / 2.0, j) * grid.fundamental
    if abs(snapped - SQRT2) > SNAP_TOLERANCE * SQRT2:
        raise IncommensurateBoxError(grid.length, f"snapped |k| = {snapped:.4f} is more than 2% from sqrt(2)")
    if max(n, j) >= grid.n // 2:
        raise IncommensurateBoxError(grid.length, f"wavevectors exceed the resolved range of N={grid.n}")
    return (n, 0), (-n // 2, j), (-n // 2, -j)


def ansatz_field(s: AmplitudeState, gamma: float, grid: GridSpec) -> RealField:
    """
    Sample ū = m*(γ)(aφ₁ + bφ₂ + cφ₃) on the grid.

    Lamellar states (b = c = 0) only need L to be a multiple of √2π; any
    nonzero b or c requires the hexagonal snapping of ``hexagonal_wavevectors``.
    """
    m_star = odt(gamma)
    x, y = grid.coordinates
    k0 = grid.fundamental

    if s.b == 0.0 and s.c == 0.0:
        periods = grid.length / (SQRT2 * math.pi)
        n = round(periods)
        if n < 1 or abs(periods - n) > 1e-9 * max(1.0, periods):
            raise IncommensurateBoxError(grid.length, "L must be an integer multiple of sqrt(2)*pi")
        if n >= grid.n // 2:
            raise IncommensurateBoxError(grid.length, f"wavevector exceeds the resolved range of N={grid.n}")
        waves = (((n, 0), s.a),)
    else:
        k1, k2, k3 = hexagonal_wavevectors(grid)
        waves = ((k1, s.a), (k2, s.b), (k3, s.c))

    values = np.zeros((grid.n, grid.n))
    for (ix, iy), amplitude in waves:
        if amplitude != 0.0:
            values += amplitude * SQRT2 * np.cos(k0 * (ix * x + iy * y))
    values = m_star * values
    return RealField(grid, values - values.mean())
