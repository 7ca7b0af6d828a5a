"""
Implicit gradient-stable stepping with energy-descent acceptance.

Backward Euler for the H⁻¹ flow, solved by a stabilized fixed-point
iteration. Each inner iterate solves a constant-coefficient system diagonal in
Fourier space:

    (1 + Δt|k|⁴/γ² + Δt + ΔtA|k|²) ŵ_{j+1} = ûⁿ − Δt|k|² F[N(w_j)] + ΔtA|k|² ŵ_j

with N(w) = w³ + 3mw² − (1−3m²)w and A recomputed from max|w_j|. A step is
accepted only if E_diss does not increase; rejected steps are retried with a
halved Δt through the step retry policy.
"""
import logging
from functools import lru_cache
from typing import Tuple

import numpy as np

from app.services.energy import breakdown_from_deviation
from app.services.spectral_core import to_physical, to_spectral
from domain.fields import GridSpec, RealField
from domain.solver_state import SolverState, Stepper
from infrastructure.error_handling.exceptions import StepRejectedError
from infrastructure.error_handling.retry import DEFAULT_STEP_RETRY, RetryConfig, retry_with_smaller_step
from infrastructure.monitoring import prometheus_metrics

logger = logging.getLogger(__name__)

FIXED_POINT_TOLERANCE = 1e-10
MAX_FIXED_POINT_ITERATIONS = 50
ENERGY_SLACK = 1e-12
DIVERGENCE_BOUND = 1e6


class GradientStableSolver:
    """
    Fixed-point solver for one implicit step on a given grid and (γ, m).
    """

    def __init__(
        self,
        grid: GridSpec,
        gamma: float,
        m: float,
        tolerance: float = FIXED_POINT_TOLERANCE,
        max_iterations: int = MAX_FIXED_POINT_ITERATIONS
    ):
        self.grid = grid
        self.gamma = gamma
        self.m = m
        self.tolerance = tolerance
        self.max_iterations = max_iterations

        self.k2 = grid.k2
        self.k4 = grid.k2 ** 2
        self.linear_coefficient = 1.0 - 3.0 * m ** 2

    def nonlinearity(self, w: np.ndarray) -> np.ndarray:
        return w ** 3 + 3.0 * self.m * w ** 2 - self.linear_coefficient * w

    def stabilization(self, w: np.ndarray) -> float:
        w_max = float(np.max(np.abs(w)))
        return max(2.0, 3.0 * w_max ** 2 + 6.0 * abs(self.m) * w_max + self.linear_coefficient)

    def solve(self, v_hat: np.ndarray, dt: float) -> Tuple[np.ndarray, int]:
        """
        Solve the implicit step from coefficients v_hat.

        Returns:
            (coefficients of the new ū, iterations used)

        Raises:
            StepRejectedError: if the iteration diverges or does not converge
        """
        k2 = self.k2
        base = 1.0 + dt * self.k4 / self.gamma ** 2 + dt

        w_hat = v_hat.copy()
        w_hat[0, 0] = 0.0
        w = to_physical(w_hat)

        for iteration in range(1, self.max_iterations + 1):
            a = self.stabilization(w)
            rhs = v_hat - dt * k2 * to_spectral(self.nonlinearity(w)) + dt * a * k2 * w_hat
            w_hat_next = rhs / (base + dt * a * k2)
            w_hat_next[0, 0] = 0.0
            w_next = to_physical(w_hat_next)

            change = float(np.max(np.abs(w_next - w)))
            if not np.isfinite(change) or change > DIVERGENCE_BOUND:
                raise StepRejectedError(Stepper.GRADIENT_STABLE.value, dt, "diverging fixed-point iteration")

            w_hat, w = w_hat_next, w_next
            if change < self.tolerance:
                return w_hat, iteration

        raise StepRejectedError(
            Stepper.GRADIENT_STABLE.value, dt,
            f"no convergence in {self.max_iterations} iterations"
        )

    def energy(self, v_hat: np.ndarray) -> float:
        return breakdown_from_deviation(v_hat, self.grid, self.gamma, self.m).e_diss

    def step(self, v_hat: np.ndarray, dt: float, energy_before: float) -> Tuple[np.ndarray, int, float]:
        """
        One accepted-or-rejected step.

        Returns:
            (new coefficients, iterations, E_diss after)

        Raises:
            StepRejectedError: if the solve fails or E_diss increases
        """
        w_hat, iterations = self.solve(v_hat, dt)
        energy_after = self.energy(w_hat)
        if energy_after > energy_before + ENERGY_SLACK * abs(energy_before):
            raise StepRejectedError(
                Stepper.GRADIENT_STABLE.value, dt,
                f"energy increase: {energy_before:.12e} -> {energy_after:.12e}"
            )
        prometheus_metrics.fixed_point_iterations.observe(iterations)
        return w_hat, iterations, energy_after


@lru_cache(maxsize=32)
def get_gradient_stable_solver(grid: GridSpec, gamma: float, m: float) -> GradientStableSolver:
    return GradientStableSolver(grid, gamma, m)


def advance_gradient_stable(
    solver: GradientStableSolver,
    v_hat: np.ndarray,
    dt: float,
    energy_before: float,
    retry: RetryConfig = DEFAULT_STEP_RETRY
) -> Tuple[np.ndarray, int, float, float]:
    """
    Array-level step with Δt halving.

    Returns:
        (new coefficients, iterations, E_diss after, Δt used)
    """
    (w_hat, iterations, energy_after), used_dt = retry_with_smaller_step(
        lambda trial_dt: solver.step(v_hat, trial_dt, energy_before),
        dt,
        Stepper.GRADIENT_STABLE.value,
        retry,
    )
    return w_hat, iterations, energy_after, used_dt


def gradient_stable_step(state: SolverState, retry: RetryConfig = DEFAULT_STEP_RETRY) -> Tuple[SolverState, int]:
    """
    One gradient-stable step from ``state``.

    Returns:
        (new state with the Δt actually used, fixed-point iterations)

    Raises:
        StepperAbortError: after the halving budget is exhausted
    """
    solver = get_gradient_stable_solver(state.grid, state.gamma, state.m)
    v_hat = to_spectral(state.field.values)
    v_hat[0, 0] = 0.0
    w_hat, iterations, _, used_dt = advance_gradient_stable(solver, v_hat, state.dt, solver.energy(v_hat), retry)
    new_state = state.evolve(
        field=RealField(state.grid, to_physical(w_hat)),
        t=state.t + used_dt,
        dt=used_dt,
        stepper=Stepper.GRADIENT_STABLE,
    )
    return new_state, iterations
