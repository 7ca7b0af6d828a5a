"""
Unit tests for the phase integrators and the domain refit.
"""

import numpy as np
import pytest

from app.services.pipeline import RunTracker, domain_refit, etdrk4_until, gradient_stable_until
from app.services.pipeline.integrator import state_residual
from domain.fields import RealField
from domain.solver_state import SolverState, Stepper


@pytest.fixture
def random_state(random_deviation):
    return SolverState(field=random_deviation, t=0.0, dt=0.05, gamma=3.0, m=0.1)


@pytest.mark.unit
@pytest.mark.pipeline
class TestEtdrk4Until:
    """Tests for etdrk4_until."""

    def test_lands_on_target(self, random_state):
        """Test the last step is shortened to hit t_end exactly."""
        result = etdrk4_until(random_state, 0.35)

        assert result.t == 0.35
        assert result.dt == 0.05
        assert result.stepper == Stepper.ETDRK4
        assert abs(result.field.mean) < 1e-12

    def test_tracker_sees_every_step(self, random_state):
        """Test each accepted step is observed and the best is the minimum."""
        tracker = RunTracker(3.0, 0.1, record_trace=True)

        etdrk4_until(random_state, 0.5, tracker=tracker)
        densities = [energy.diss_density for _, energy in tracker.trace]

        assert len(tracker.trace) == 10
        assert tracker.best.energy.diss_density == min(densities)
        assert tracker.last.t == pytest.approx(0.5)

    def test_weighting_changes_path(self, random_state):
        """Test the weighting alters the evolution."""
        plain = etdrk4_until(random_state, 0.3)
        weighted = etdrk4_until(random_state, 0.3, weighting=(2.0, 0.5))

        assert not np.allclose(plain.field.values, weighted.field.values)

    def test_already_at_target(self, random_state):
        """Test t_end = t is a no-op."""
        result = etdrk4_until(random_state, 0.0)

        assert np.allclose(result.field.values, random_state.field.values)


@pytest.mark.unit
@pytest.mark.pipeline
class TestGradientStableUntil:
    """Tests for gradient_stable_until."""

    def test_converged_state_not_stepped(self, small_grid):
        """Test a stationary start returns at once."""
        state = SolverState(field=RealField.constant(small_grid, 0.0), t=3.0, dt=0.1, gamma=3.0, m=0.5)

        result, converged, residual = gradient_stable_until(state, 10.0, tolerance=1e-8)

        assert converged
        assert residual == 0.0
        assert result.t == 3.0

    def test_energy_decreases(self, random_state):
        """Test the tracked energy at the end is below the start."""
        tracker = RunTracker(3.0, 0.1)
        start = tracker.observe_state(random_state)

        result, _, residual = gradient_stable_until(random_state, 2.0, tracker=tracker)

        assert result.t == pytest.approx(2.0)
        assert result.stepper == Stepper.GRADIENT_STABLE
        assert tracker.last.energy.e_diss < start.e_diss
        assert residual == pytest.approx(state_residual(result))


@pytest.mark.unit
@pytest.mark.pipeline
class TestDomainRefit:
    """Tests for domain_refit."""

    def test_disordered_state_skipped(self, small_grid):
        """Test no refit happens without an optimal length."""
        state = SolverState(field=RealField.constant(small_grid, 0.0), t=0.0, dt=0.1, gamma=3.0, m=0.0)

        result = domain_refit(state)

        assert result.skipped
        assert not result.applied
        assert result.state is state

    def test_stretched_box_recovers(self, relaxed_lamella):
        """Test a stretched lamella is refit to the same optimal box and its energy density drops."""
        base = SolverState(field=relaxed_lamella, t=0.0, dt=0.05, gamma=3.0, m=0.0)
        stretched_grid = relaxed_lamella.grid.with_length(1.3 * relaxed_lamella.grid.length)
        stretched = base.evolve(field=relaxed_lamella.on_grid(stretched_grid))

        reference = domain_refit(base, settle_time=1.0)
        result = domain_refit(stretched, settle_time=1.0)

        assert result.length_after == pytest.approx(reference.length_after, rel=1e-9)
        assert result.applied
        assert result.density_after < result.density_before
        assert result.state.grid.length == pytest.approx(result.length_after)
        assert result.state.t == pytest.approx(1.0)
