"""
Phase integrators shared by the protocol, the refit and the benchmark.

Both integrators advance a SolverState to a target time, feed every accepted
state to an optional RunTracker and return the new state.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from app.services.annealing import weighting_multiplier
from app.services.dynamics.etdrk4 import get_etdrk4_stepper
from app.services.dynamics.gradient_stable import advance_gradient_stable, get_gradient_stable_solver
from app.services.dynamics.operators import adapt_dt, residual_norm_spectrum
from app.services.energy import breakdown_from_deviation
from app.services.spectral_core import to_physical, to_spectral
from domain.fields import GridSpec, RealField
from domain.records import EnergyBreakdown
from domain.solver_state import SolverState, Stepper
from infrastructure.error_handling.retry import DEFAULT_STEP_RETRY, RetryConfig, retry_with_smaller_step
from infrastructure.monitoring import prometheus_metrics

logger = logging.getLogger(__name__)

TIME_SLACK = 1e-9


def _reached(t: float, t_end: float) -> bool:
    return t_end - t <= TIME_SLACK * max(1.0, abs(t_end))


@dataclass
class TrackedState:
    grid: GridSpec
    coeffs: np.ndarray
    t: float
    energy: EnergyBreakdown

    @property
    def field(self) -> RealField:
        return RealField(self.grid, to_physical(self.coeffs))


@dataclass
class RunTracker:
    """
    Lowest E_diss-per-area state seen so far and, optionally, the energy trace.
    """

    gamma: float
    m: float
    record_trace: bool = False
    best: Optional[TrackedState] = None
    last: Optional[TrackedState] = None
    trace: List[Tuple[float, EnergyBreakdown]] = field(default_factory=list)

    def observe(self, grid: GridSpec, coeffs: np.ndarray, t: float) -> EnergyBreakdown:
        energy = breakdown_from_deviation(coeffs, grid, self.gamma, self.m)
        self.last = TrackedState(grid, coeffs, t, energy)
        if self.best is None or energy.diss_density < self.best.energy.diss_density:
            self.best = TrackedState(grid, coeffs.copy(), t, energy)
        if self.record_trace:
            self.trace.append((t, energy))
        return energy

    def observe_state(self, state: SolverState) -> EnergyBreakdown:
        coeffs = to_spectral(state.field.values)
        coeffs[0, 0] = 0.0
        return self.observe(state.grid, coeffs, state.t)


def etdrk4_until(
    state: SolverState,
    t_end: float,
    retry: RetryConfig = DEFAULT_STEP_RETRY,
    tracker: Optional[RunTracker] = None,
    weighting: Optional[Tuple[float, float]] = None,
    dealias: bool = False
) -> SolverState:
    """
    ETDRK4 steps of state.dt up to t_end, the last one shortened to land on t_end.

    Args:
        state: Starting state
        t_end: Target time
        retry: Step halving policy
        tracker: Receives every accepted state
        weighting: (k*, ρ) to apply the spectral weighting after every step
        dealias: Apply the 2/3-rule mask to the nonlinear term

    Returns:
        State at t_end; dt is left at the base step
    """
    grid, gamma, m = state.grid, state.gamma, state.m
    multiplier = weighting_multiplier(grid, *weighting) if weighting else None
    v = to_spectral(state.field.values)
    v[0, 0] = 0.0
    t = state.t

    while not _reached(t, t_end):
        h = min(state.dt, t_end - t)
        current = v
        v, used = retry_with_smaller_step(
            lambda trial: get_etdrk4_stepper(grid, gamma, m, trial, dealias).step(current),
            h,
            Stepper.ETDRK4.value,
            retry,
        )
        if multiplier is not None:
            v = v * multiplier
        t += used
        prometheus_metrics.steps_total.labels(stepper=Stepper.ETDRK4.value).inc()
        if tracker is not None:
            tracker.observe(grid, v, t)

    if abs(t - t_end) <= TIME_SLACK * max(1.0, abs(t_end)):
        t = t_end
    return state.evolve(field=RealField(grid, to_physical(v)), t=t, stepper=Stepper.ETDRK4)


def gradient_stable_until(
    state: SolverState,
    t_end: float,
    retry: RetryConfig = DEFAULT_STEP_RETRY,
    tracker: Optional[RunTracker] = None,
    tolerance: Optional[float] = None
) -> Tuple[SolverState, bool, float]:
    """
    Gradient-stable steps with adaptive Δt up to t_end or until the residual drops below tolerance.

    Returns:
        (new state carrying the adapted Δt, converged flag, last residual)
    """
    grid, gamma, m = state.grid, state.gamma, state.m
    solver = get_gradient_stable_solver(grid, gamma, m)
    v = to_spectral(state.field.values)
    v[0, 0] = 0.0
    t, dt = state.t, state.dt

    residual = residual_norm_spectrum(v, grid, gamma, m)
    converged = tolerance is not None and residual < tolerance
    energy = solver.energy(v)

    while not converged and not _reached(t, t_end):
        h = min(dt, t_end - t)
        v, iterations, energy, used = advance_gradient_stable(solver, v, h, energy, retry)
        t += used
        dt = adapt_dt(iterations, used if used < h else dt)
        prometheus_metrics.steps_total.labels(stepper=Stepper.GRADIENT_STABLE.value).inc()
        if tracker is not None:
            tracker.observe(grid, v, t)
        residual = residual_norm_spectrum(v, grid, gamma, m)
        converged = tolerance is not None and residual < tolerance

    new_state = state.evolve(
        field=RealField(grid, to_physical(v)),
        t=t,
        dt=dt,
        stepper=Stepper.GRADIENT_STABLE,
    )
    return new_state, converged, residual


def state_residual(state: SolverState) -> float:
    v = to_spectral(state.field.values)
    v[0, 0] = 0.0
    return residual_norm_spectrum(v, state.grid, state.gamma, state.m)

