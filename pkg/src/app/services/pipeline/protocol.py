"""
Hybrid annealed minimization protocol.

Phases of one run, on an N×N grid with L = 12π(2/γ)^{1/3}:

1. random initial ū with u = m + ū in [−1, 1], shifted to mean zero
2. ETDRK4 to t1
3. ETDRK4 with spectral weighting at the dominant wavenumber to t2
4. noise injection, then ETDRK4 to t3
5. gradient-stable stepping with adaptive Δt to t4
6. domain refit (``refit_repeats`` times)
7. gradient-stable stepping to t5 or until the residual drops below tolerance
8. classification of the lowest-energy state seen

Phases 3 and 4 are skipped when the state has already converged at t1.
Energies are compared per unit area, so states on refitted boxes are comparable.
"""
import math
import time
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from app.services.annealing import dominant_mode, inject_noise
from app.services.asymptotics import rescaled_mass
from app.services.classification import classify_field
from app.services.dynamics.operators import default_dt
from app.services.energy import optimal_length, unit_domain_integrals
from app.services.pipeline.integrator import RunTracker, etdrk4_until, gradient_stable_until, state_residual
from app.services.pipeline.refit import domain_refit
from app.services.spectral_core import forward, to_physical
from domain.fields import GridSpec, RealField
from domain.params import DEFAULT_GRID_N, ModelParams, Schedule, build
from domain.records import FAILED_LABEL, STATUS_FAILED, RunRecord
from domain.solver_state import SolverState
from infrastructure.error_handling.exceptions import StepperAbortError
from infrastructure.error_handling.retry import DEFAULT_STEP_RETRY, RetryConfig
from infrastructure.logging.structured_logger import get_structured_logger
from infrastructure.logging_config import get_logger
from infrastructure.repositories.energy_trace_repository import EnergyTraceRepository
from infrastructure.storage import save_checkpoint, write_field, write_pgm

logger = get_logger(__name__)
structured_logger = get_structured_logger(__name__)


def initial_length(gamma: float) -> float:
    """L = 12π(2/γ)^{1/3}."""
    return 12.0 * math.pi * (2.0 / gamma) ** (1.0 / 3.0)


def initial_field(grid: GridSpec, m: float, rng: np.random.Generator) -> RealField:
    """Uniform samples in [−1−m, 1−m] minus their mean."""
    values = rng.uniform(-1.0 - m, 1.0 - m, size=(grid.n, grid.n))
    return RealField(grid, values - values.mean())


def run_directory(output_dir: Union[str, Path], gamma: float, m: float, seed: int) -> Path:
    return Path(output_dir) / f"g{gamma:.6g}_m{m:.6g}_s{seed}"


class MinimizationProtocol:
    """
    One protocol run at (γ, m) from a seed.
    """

    def __init__(
        self,
        gamma: float,
        m: float,
        seed: int,
        schedule: Optional[Schedule] = None,
        n: int = DEFAULT_GRID_N,
        length: Optional[float] = None,
        dt: Optional[float] = None,
        retry: RetryConfig = DEFAULT_STEP_RETRY,
        output_dir: Optional[Union[str, Path]] = None,
        timing: bool = True
    ):
        """
        Validate parameters; nothing is computed until ``run``.

        Args:
            gamma: Interaction parameter γ > 0
            m: Mean mass, |m| < 1
            seed: Seed of the run's random generator
            schedule: Phase boundaries and knobs
            n: Grid size
            length: Box length; defaults to 12π(2/γ)^{1/3}
            dt: Base time step; defaults to 0.1/(1 + γ^{3/2})
            retry: Step halving policy
            output_dir: When set, the run writes dumps, a checkpoint and an energy trace
            timing: When False, wall_s is recorded as 0
        """
        self.params = build(
            ModelParams,
            gamma=gamma,
            m=m,
            n=n,
            length=length,
            dt=dt,
            schedule=schedule or Schedule(),
        )
        self.seed = int(seed)
        self.retry = retry
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.timing = timing
        self.rng: Optional[np.random.Generator] = None
        self.refit_applied = False
        self.k_star_trace: List[Tuple[float, float]] = []

    @property
    def schedule(self) -> Schedule:
        return self.params.schedule

    def _mark(self, phase: str, state: SolverState, tracker: RunTracker) -> None:
        k_star = dominant_mode(forward(state.field))
        self.k_star_trace.append((state.t, math.nan if k_star is None else k_star))
        energy = tracker.last.energy if tracker.last is not None else tracker.observe_state(state)
        structured_logger.log_phase(phase, state.t, state.dt, energy.diss_density)

    def _evolve(self, state: SolverState, tracker: RunTracker) -> Tuple[SolverState, bool]:
        s = self.schedule
        tol = s.residual_tol

        state = etdrk4_until(state, s.t1, self.retry, tracker, dealias=s.dealias)
        self._mark("t1", state, tracker)
        converged = state_residual(state) < tol

        if not converged:
            k_star = dominant_mode(forward(state.field)) if s.rho > 0 else None
            weighting = (k_star, s.rho) if k_star is not None else None
            state = etdrk4_until(state, s.t2, self.retry, tracker, weighting=weighting, dealias=s.dealias)
            self._mark("t2", state, tracker)

            amplitude = s.noise_amplitude_factor * (state.field.max - state.field.min)
            state = state.evolve(field=inject_noise(state.field, amplitude, self.rng))
            tracker.observe_state(state)
            state = etdrk4_until(state, s.t3, self.retry, tracker, dealias=s.dealias)
            self._mark("t3", state, tracker)

        state, converged, _ = gradient_stable_until(state, max(s.t4, state.t), self.retry, tracker, tol)
        self._mark("t4", state, tracker)

        for _ in range(s.refit_repeats):
            result = domain_refit(state, s.settle_time, self.retry, tracker)
            self.refit_applied = self.refit_applied or result.applied
            state = result.state
            if result.skipped:
                break

        state, converged, _ = gradient_stable_until(state, max(s.t5, state.t), self.retry, tracker, tol)
        self._mark("end", state, tracker)
        return state, converged

    def run(self) -> RunRecord:
        """
        Execute every phase and summarize the lowest-energy state.

        A stepper abort does not raise: the record is returned with status
        ``failed``, label ``Failed`` and the error code, carrying the best state
        reached before the abort.
        """
        p = self.params
        started = time.perf_counter()
        self.rng = np.random.default_rng(self.seed)
        self.refit_applied = False
        self.k_star_trace = []
        structured_logger.set_context(gamma=p.gamma, m=p.m, seed=self.seed)

        grid = GridSpec(p.n, p.length or initial_length(p.gamma))
        state = SolverState(
            field=initial_field(grid, p.m, self.rng),
            t=0.0,
            dt=p.dt or default_dt(p.gamma),
            gamma=p.gamma,
            m=p.m,
        )
        tracker = RunTracker(p.gamma, p.m, record_trace=self.output_dir is not None)
        tracker.observe_state(state)

        final_state = state
        failure: Optional[StepperAbortError] = None
        try:
            final_state, _ = self._evolve(state, tracker)
        except StepperAbortError as e:
            failure = e
            last = tracker.last
            final_state = state.evolve(field=last.field, t=last.t)
            logger.error(f"Run (gamma={p.gamma}, m={p.m}, seed={self.seed}) aborted: {e.message}")

        wall = time.perf_counter() - started
        record = self._summarize(tracker, wall, failure)
        if self.output_dir is not None:
            self._persist(record, tracker, final_state)

        structured_logger.log_run_complete(record.label, record.residual, wall)
        structured_logger.clear_context()
        return record

    def _summarize(self, tracker: RunTracker, wall: float, failure: Optional[StepperAbortError]) -> RunRecord:
        p = self.params
        best = tracker.best
        deviation = best.field
        best_state = SolverState(field=deviation, t=best.t, dt=p.dt or default_dt(p.gamma), gamma=p.gamma, m=p.m)

        classification = classify_field(deviation)
        i1, i2, i3 = unit_domain_integrals(best.energy, best.grid.length)
        optimum = optimal_length(i1, i3, p.gamma, i2)

        record = RunRecord(
            gamma=p.gamma,
            m=p.m,
            seed=self.seed,
            label=classification.label.value,
            e_paper=best.energy.e_paper,
            e_diss=best.energy.e_diss,
            l_opt=math.nan if optimum.degenerate else optimum.length,
            k_star=math.nan if classification.k_star is None else classification.k_star,
            residual=state_residual(best_state),
            wall_s=wall if self.timing else 0.0,
            schedule=self.schedule,
            beta=rescaled_mass(p.gamma, p.m),
            u_half_range=deviation.half_range,
            k_star_trace=tuple(self.k_star_trace),
            refit_applied=self.refit_applied,
        )
        if failure is not None:
            record.status = STATUS_FAILED
            record.label = FAILED_LABEL
            record.error_code = failure.code
        return record

    def _persist(self, record: RunRecord, tracker: RunTracker, final_state: SolverState) -> None:
        p = self.params
        directory = run_directory(self.output_dir, p.gamma, p.m, self.seed)
        best = tracker.best
        u_best = RealField(best.grid, p.m + to_physical(best.coeffs))

        record.snapshot = str(write_field(directory / "best.okf", u_best))
        write_pgm(directory / "best.pgm", u_best)
        save_checkpoint(directory / "final.okf", final_state, self.seed)
        EnergyTraceRepository(directory / "energy_trace.csv").save(tracker.trace)
        logger.info(f"Run artifacts written to {directory}")


def run_protocol(
    gamma: float,
    m: float,
    seed: int,
    schedule: Optional[Schedule] = None,
    **options
) -> RunRecord:
    """Run the minimization protocol; see MinimizationProtocol for options."""
    return MinimizationProtocol(gamma, m, seed, schedule, **options).run()
