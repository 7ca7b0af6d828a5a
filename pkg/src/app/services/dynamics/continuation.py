"""
Matrix-free Newton-Krylov continuation of stationary states in m.

Stationary states solve rhs(ū; γ, m) = 0 on mean-zero fields. Each Newton
correction solves J·δ = −rhs with restarted GMRES, using only Jacobian-vector
products, preconditioned by the inverse of −(|k|⁴/γ² + |k|² + 1). Both the
operator and the preconditioner project onto mean-zero fields. Continuation is
natural: the converged state at m seeds the solve at m + δm, and the branch is
cut short (not raised) when Newton fails.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from app.services.dynamics.operators import jacobian_apply_values, residual_norm, rhs_spectrum
from app.services.energy import total_energy
from app.services.spectral_core import to_physical, to_spectral
from domain.fields import GridSpec, RealField
from domain.records import BranchPoint, ContinuationBranch
from infrastructure.error_handling.exceptions import ContinuationStartError, InvalidParameterError
from infrastructure.logging.structured_logger import get_structured_logger
from infrastructure.monitoring import prometheus_metrics

logger = logging.getLogger(__name__)
structured_logger = get_structured_logger(__name__)

START_TOLERANCE = 1e-4
RESIDUAL_TOLERANCE = 1e-8


@dataclass
class NewtonResult:
    """
    Outcome of one Newton solve.

    status: 1 converged, 0 line search failed, 2 iteration limit.
    """

    values: np.ndarray
    residual: float
    iterations: int
    status: int
    message: str

    @property
    def converged(self) -> bool:
        return self.status == 1


class NewtonKrylovSolver:
    """
    Newton's method with GMRES inner solves and backtracking on ‖rhs‖₂.
    """

    def __init__(
        self,
        grid: GridSpec,
        gamma: float,
        tolerance: float = RESIDUAL_TOLERANCE,
        max_iterations: int = 20,
        krylov_rtol: float = 1e-6,
        restart: int = 40,
        krylov_maxiter: int = 20,
        min_step: float = 2.0 ** -10
    ):
        self.grid = grid
        self.gamma = gamma
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.krylov_rtol = krylov_rtol
        self.restart = restart
        self.krylov_maxiter = krylov_maxiter
        self.min_step = min_step

        k2 = grid.k2
        self.preconditioner_symbol = -1.0 / (k2 ** 2 / gamma ** 2 + k2 + 1.0)
        self.preconditioner_symbol[0, 0] = 0.0

    def _shape(self) -> Tuple[int, int]:
        size = self.grid.n ** 2
        return size, size

    @staticmethod
    def _project(x: np.ndarray) -> np.ndarray:
        return x - x.mean()

    def _residual(self, u: np.ndarray, m: float) -> Tuple[np.ndarray, float]:
        r_hat = rhs_spectrum(to_spectral(u), self.grid, self.gamma, m)
        return to_physical(r_hat), math.sqrt(float(np.sum(np.abs(r_hat) ** 2)))

    def _operators(self, u: np.ndarray, m: float) -> Tuple[LinearOperator, LinearOperator]:
        n = self.grid.n

        def jacobian(x):
            v = self._project(np.asarray(x).reshape(n, n))
            return self._project(jacobian_apply_values(u, v, self.grid, self.gamma, m)).ravel()

        def precondition(x):
            v = np.asarray(x).reshape(n, n)
            return to_physical(self.preconditioner_symbol * to_spectral(v)).ravel()

        shape = self._shape()
        return (
            LinearOperator(shape, matvec=jacobian, dtype=np.float64),
            LinearOperator(shape, matvec=precondition, dtype=np.float64),
        )

    def solve(self, initial: np.ndarray, m: float) -> NewtonResult:
        """
        Drive rhs(ū; γ, m) below the tolerance starting from ``initial``.

        Args:
            initial: Mean-zero N×N samples
            m: Mean mass

        Returns:
            NewtonResult
        """
        u = self._project(np.array(initial, dtype=np.float64))
        r, norm = self._residual(u, m)

        for iteration in range(self.max_iterations + 1):
            if norm < self.tolerance:
                return NewtonResult(u, norm, iteration, 1, "converged")
            if iteration == self.max_iterations:
                break

            operator, preconditioner = self._operators(u, m)
            delta, info = gmres(
                operator,
                -r.ravel(),
                rtol=self.krylov_rtol,
                atol=0.0,
                restart=self.restart,
                maxiter=self.krylov_maxiter,
                M=preconditioner,
            )
            delta = self._project(delta.reshape(u.shape))
            prometheus_metrics.newton_iterations_total.inc()
            structured_logger.log_newton_iteration(m, iteration + 1, norm, int(info), gamma=self.gamma)

            step = 1.0
            while True:
                candidate = u + step * delta
                candidate_r, candidate_norm = self._residual(candidate, m)
                if not math.isfinite(candidate_norm):
                    candidate_norm = math.inf
                if candidate_norm < norm:
                    break
                step /= 2.0
                if step < self.min_step:
                    message = f"line search failed at iteration {iteration + 1} (residual {norm:.3e})"
                    return NewtonResult(u, norm, iteration + 1, 0, message)

            u, r, norm = candidate, candidate_r, candidate_norm

        return NewtonResult(u, norm, self.max_iterations, 2, f"no convergence in {self.max_iterations} iterations")


def newton_solve(deviation: RealField, gamma: float, m: float, **options) -> NewtonResult:
    """Polish ``deviation`` to a stationary state at (γ, m)."""
    return NewtonKrylovSolver(deviation.grid, gamma, **options).solve(deviation.values, m)


def continue_in_m(
    deviation: RealField,
    gamma: float,
    m0: float,
    dm: float,
    n_steps: int,
    label: str = "",
    **options
) -> ContinuationBranch:
    """
    Trace stationary states at m0, m0 + dm, ..., m0 + n_steps·dm.

    Args:
        deviation: Approximately stationary ū at m0 (residual < 1e-4)
        gamma: Interaction parameter γ
        m0: Starting mass
        dm: Mass increment (may be negative)
        n_steps: Number of increments
        label: Optional branch name
        **options: NewtonKrylovSolver keyword arguments

    Returns:
        ContinuationBranch; ``truncated`` is set if Newton failed before the end

    Raises:
        ContinuationStartError: if the start is not approximately stationary
    """
    if n_steps < 0:
        raise InvalidParameterError("n_steps", n_steps, "must be non-negative")
    start_residual = residual_norm(deviation, gamma, m0)
    if not start_residual < START_TOLERANCE:
        raise ContinuationStartError(start_residual, START_TOLERANCE)

    solver = NewtonKrylovSolver(deviation.grid, gamma, **options)
    branch = ContinuationBranch(gamma=gamma, label=label)
    current = deviation.values

    for step in range(n_steps + 1):
        m = m0 + step * dm
        if not abs(m) < 1.0:
            branch.truncated = True
            branch.reason = f"mass {m:.6f} left (-1, 1)"
            break

        result = solver.solve(current, m)
        if not result.converged:
            branch.truncated = True
            branch.reason = f"Newton failure at m={m:.6f}: {result.message}"
            logger.warning(branch.reason)
            break

        field = RealField(deviation.grid, result.values)
        energy = total_energy(field.shifted(m), gamma, m)
        branch.points.append(
            BranchPoint(
                gamma=gamma,
                m=m,
                field=field,
                energy=energy,
                residual=result.residual,
                newton_iterations=result.iterations,
            )
        )
        current = result.values

    logger.info(
        f"Continuation at gamma={gamma}: {len(branch.points)} points"
        + (f", truncated ({branch.reason})" if branch.truncated else "")
    )
    return branch


@dataclass
class BranchComparison:
    """Lowest-energy branch per common m and the m values where branch energies cross."""

    masses: List[float] = field(default_factory=list)
    lowest: List[str] = field(default_factory=list)
    crossings: List[Tuple[str, str, float]] = field(default_factory=list)


def _energy_of(point: BranchPoint, energy: str) -> float:
    return point.energy.diss_density if energy == "diss" else point.energy.paper_density


def compare_branches(branches: Dict[str, ContinuationBranch], energy: str = "diss", decimals: int = 10) -> BranchComparison:
    """
    Compare branch energies per unit area on their common m values.

    Args:
        branches: Branches keyed by label
        energy: "diss" for E_diss or "paper" for E_paper
        decimals: Rounding used to match m values across branches

    Returns:
        BranchComparison
    """
    if energy not in ("diss", "paper"):
        raise InvalidParameterError("energy", energy, "must be 'diss' or 'paper'")

    tables = {
        name: {round(p.m, decimals): _energy_of(p, energy) for p in branch.points}
        for name, branch in branches.items()
    }
    if not tables:
        return BranchComparison()
    common = sorted(set.intersection(*(set(t) for t in tables.values())))
    comparison = BranchComparison(masses=common)
    names = sorted(tables)

    for m in common:
        comparison.lowest.append(min(names, key=lambda name: tables[name][m]))

    for i, first in enumerate(names):
        for second in names[i + 1:]:
            for m_left, m_right in zip(common, common[1:]):
                d_left = tables[first][m_left] - tables[second][m_left]
                d_right = tables[first][m_right] - tables[second][m_right]
                if d_left == 0.0:
                    comparison.crossings.append((first, second, m_left))
                elif d_left * d_right < 0.0:
                    m_cross = m_left + (m_right - m_left) * d_left / (d_left - d_right)
                    comparison.crossings.append((first, second, m_cross))

    return comparison
