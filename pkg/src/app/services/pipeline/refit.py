"""
Domain-size refit.

The state is viewed on the unit box, the box length minimizing the rescaled
energy is computed in closed form, and the samples are reinterpreted on the
new box. After a short gradient-stable settle the refit is kept only if the
energy per unit area went down.
"""
import logging
from dataclasses import dataclass
from typing import Optional

from app.services.energy import breakdown_from_deviation, optimal_length, rescaled_energy, unit_domain_integrals
from app.services.pipeline.integrator import RunTracker, gradient_stable_until
from app.services.spectral_core import to_spectral
from domain.solver_state import SolverState
from infrastructure.error_handling.retry import DEFAULT_STEP_RETRY, RetryConfig

logger = logging.getLogger(__name__)

DEFAULT_SETTLE_TIME = 5.0


@dataclass(frozen=True)
class RefitResult:
    """
    Outcome of one refit.

    ``state`` is the settled state when ``applied``, otherwise the input state.
    Densities are E_diss per unit area; ``rescaled_*`` is Ẽ with E_paper weights.
    """

    state: SolverState
    applied: bool
    skipped: bool
    length_before: float
    length_after: Optional[float] = None
    density_before: float = float("nan")
    density_after: float = float("nan")
    rescaled_before: float = float("nan")
    rescaled_after: float = float("nan")


def _breakdown(state: SolverState):
    coeffs = to_spectral(state.field.values)
    coeffs[0, 0] = 0.0
    return breakdown_from_deviation(coeffs, state.grid, state.gamma, state.m)


def _rescaled(state: SolverState) -> float:
    energy = _breakdown(state)
    i1, i2, i3 = unit_domain_integrals(energy, state.grid.length)
    return rescaled_energy(state.grid.length, i1, i2, i3, state.gamma)


def domain_refit(
    state: SolverState,
    settle_time: float = DEFAULT_SETTLE_TIME,
    retry: RetryConfig = DEFAULT_STEP_RETRY,
    tracker: Optional[RunTracker] = None
) -> RefitResult:
    """
    Move the box to L* = (I1/(γ²I3))^{1/4} and settle.

    Args:
        state: Relaxed state (normally the one reached at t4)
        settle_time: Gradient-stable time integrated on the new box
        retry: Step halving policy for the settle
        tracker: Receives the settling states

    Returns:
        RefitResult; ``skipped`` when I1 or I3 vanish (disordered state)
    """
    length = state.grid.length
    energy = _breakdown(state)
    i1, i2, i3 = unit_domain_integrals(energy, length)
    optimum = optimal_length(i1, i3, state.gamma, i2)

    if optimum.degenerate:
        logger.info("Domain refit skipped: no finite optimal length")
        return RefitResult(state=state, applied=False, skipped=True, length_before=length,
                           density_before=energy.diss_density)

    rescaled_before = rescaled_energy(length, i1, i2, i3, state.gamma)
    candidate = state.evolve(field=state.field.on_grid(state.grid.with_length(optimum.length)))
    settled, _, _ = gradient_stable_until(candidate, candidate.t + settle_time, retry, tracker)

    density_after = _breakdown(settled).diss_density
    applied = density_after < energy.diss_density
    logger.info(
        f"Domain refit L={length:.4f} -> {optimum.length:.4f}: "
        f"E_diss/area {energy.diss_density:.8f} -> {density_after:.8f} ({'kept' if applied else 'reverted'})"
    )
    return RefitResult(
        state=settled if applied else state,
        applied=applied,
        skipped=False,
        length_before=length,
        length_after=optimum.length,
        density_before=energy.diss_density,
        density_after=density_after,
        rescaled_before=rescaled_before,
        rescaled_after=_rescaled(settled),
    )
