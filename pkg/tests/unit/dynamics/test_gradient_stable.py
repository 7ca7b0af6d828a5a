"""
Unit tests for the gradient-stable stepper.
"""

import numpy as np
import pytest

from app.services.dynamics import Etdrk4Stepper, GradientStableSolver, default_dt, gradient_stable_step
from app.services.dynamics.gradient_stable import advance_gradient_stable
from app.services.spectral_core import to_spectral
from domain.fields import GridSpec, RealField
from domain.solver_state import SolverState, Stepper
from infrastructure.error_handling.exceptions import StepperAbortError, StepRejectedError
from infrastructure.error_handling.retry import RetryConfig, STRICT_STEP_RETRY


@pytest.fixture
def gs_setup(rng):
    grid = GridSpec(32, 8.0)
    values = rng.uniform(-0.5, 0.5, size=(32, 32))
    v = to_spectral(values - values.mean())
    v[0, 0] = 0.0
    return grid, v


@pytest.mark.unit
@pytest.mark.dynamics
class TestGradientStableSolver:
    """Tests for GradientStableSolver."""

    def test_energy_never_increases_at_large_step(self, gs_setup):
        """Test accepted steps at 100× the default Δt keep E_diss non-increasing."""
        grid, v = gs_setup
        gamma, m = 10.0, 0.1
        solver = GradientStableSolver(grid, gamma, m)
        dt = 100.0 * default_dt(gamma)
        energy = solver.energy(v)
        energies = [energy]

        for _ in range(100):
            v, _, energy, _ = advance_gradient_stable(solver, v, dt, energy)
            energies.append(energy)

        increases = np.diff(energies)
        assert np.all(increases <= 1e-12 * np.abs(energies[:-1]))
        assert energies[-1] < energies[0]

    def test_fixed_point_converges_small_step(self, gs_setup):
        """Test the inner iteration converges quickly for a small Δt."""
        grid, v = gs_setup
        solver = GradientStableSolver(grid, 3.0, 0.0)

        w, iterations = solver.solve(v, 1e-3)

        assert iterations < 20
        assert w[0, 0] == 0.0

    def test_energy_increase_rejected(self, gs_setup, mocker):
        """Test a step that raises E_diss is rejected."""
        grid, v = gs_setup
        solver = GradientStableSolver(grid, 3.0, 0.0)
        mocker.patch.object(solver, "solve", return_value=(3.0 * v, 4))

        with pytest.raises(StepRejectedError) as info:
            solver.step(v, 0.1, solver.energy(v))
        assert info.value.details["reason"].startswith("energy increase")

    def test_strict_retry_aborts(self, gs_setup, mocker):
        """Test a persistently rejected step aborts without halving budget."""
        grid, v = gs_setup
        solver = GradientStableSolver(grid, 3.0, 0.0)
        mocker.patch.object(solver, "solve", side_effect=StepRejectedError("GradientStable", 0.1, "diverging"))

        with pytest.raises(StepperAbortError):
            advance_gradient_stable(solver, v, 0.1, solver.energy(v), STRICT_STEP_RETRY)

    def test_retry_halves_step(self, gs_setup, mocker):
        """Test the Δt actually used is reported after a rejection."""
        grid, v = gs_setup
        solver = GradientStableSolver(grid, 3.0, 0.0)
        real_solve = solver.solve
        calls = []

        def flaky(v_hat, dt):
            calls.append(dt)
            if len(calls) == 1:
                raise StepRejectedError("GradientStable", dt, "no convergence in 50 iterations")
            return real_solve(v_hat, dt)

        mocker.patch.object(solver, "solve", side_effect=flaky)
        _, _, _, used = advance_gradient_stable(solver, v, 0.02, solver.energy(v), RetryConfig(max_halvings=2))

        assert used == pytest.approx(0.01)


@pytest.mark.unit
@pytest.mark.dynamics
class TestGradientStableStep:
    """Tests for the state-level step."""

    def test_advances_clock_and_marks_stepper(self, random_deviation):
        """Test t advances by the Δt used."""
        state = SolverState(field=random_deviation, t=2.0, dt=0.05, gamma=3.0, m=0.1)

        new, iterations = gradient_stable_step(state)

        assert new.t == pytest.approx(2.0 + new.dt)
        assert new.stepper is Stepper.GRADIENT_STABLE
        assert iterations >= 1
        assert abs(new.field.mean) < 1e-12

    def test_uniform_state_stays_exactly_uniform(self, small_grid):
        """Test ū ≡ 0 is reproduced bit for bit, even at a large step."""
        state = SolverState(field=RealField.constant(small_grid, 0.0), t=0.0, dt=5.0, gamma=3.0, m=0.2)

        new, _ = gradient_stable_step(state)

        assert np.all(new.field.values == 0.0)
        assert new.dt == 5.0


def smooth_start(grid):
    x, y = grid.coordinates
    values = 0.3 * np.cos(x) * np.cos(2.0 * y) + 0.2 * np.sin(3.0 * x) + 0.1 * np.cos(x + y)
    v = to_spectral(values - values.mean())
    v[0, 0] = 0.0
    return v


@pytest.mark.unit
@pytest.mark.dynamics
class TestAgreementWithEtdrk4:
    """Tests for one gradient-stable step against one ETDRK4 step."""

    def test_single_step_difference_is_second_order(self):
        """Test the one-step gap shrinks fourfold per halving of Δt."""
        grid, gamma, m = GridSpec(16, 2.0 * np.pi), 3.0, 0.1
        v = smooth_start(grid)
        solver = GradientStableSolver(grid, gamma, m, tolerance=1e-14)

        def gap(dt):
            implicit, _ = solver.solve(v, dt)
            exponential = Etdrk4Stepper(grid, gamma, m, dt).step(v)
            return float(np.max(np.abs(implicit - exponential)))

        gaps = [gap(dt) for dt in (4e-5, 2e-5, 1e-5)]

        assert 3.6 < gaps[0] / gaps[1] < 4.4
        assert 3.6 < gaps[1] / gaps[2] < 4.4
        assert gaps[2] < 1e-7
