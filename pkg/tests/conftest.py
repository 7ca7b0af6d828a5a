"""
Pytest configuration and fixtures.
"""

import math
import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from domain.amplitude import AmplitudeState
from domain.fields import GridSpec, RealField
from domain.params import Schedule

SQRT2 = math.sqrt(2.0)


def pytest_collection_modifyitems(config, items):
    """Skip acceptance runs unless OKPHASE_ACCEPTANCE=1."""
    if os.getenv("OKPHASE_ACCEPTANCE") == "1":
        return
    skip = pytest.mark.skip(reason="set OKPHASE_ACCEPTANCE=1 to run")
    for item in items:
        if "acceptance" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    """Seeded generator for reproducible random fields."""
    return np.random.default_rng(12345)


@pytest.fixture
def small_grid():
    """32×32 grid on a 2π box (integer wavenumbers)."""
    return GridSpec(32, 2.0 * math.pi)


@pytest.fixture
def lamellar_grid():
    """64×64 grid holding two periods of the |k| = √2 mode."""
    return GridSpec(64, 2.0 * SQRT2 * math.pi)


@pytest.fixture
def hex_grid():
    """64×64 grid on which the hexagonal modes snap to |k| ≈ √2."""
    return GridSpec(64, 8.0 * SQRT2 * math.pi)


@pytest.fixture
def random_deviation(small_grid, rng):
    """Mean-zero random field on the small grid."""
    values = rng.uniform(-0.5, 0.5, size=(small_grid.n, small_grid.n))
    return RealField(small_grid, values - values.mean())


@pytest.fixture
def lamellar_state():
    """Lamellar amplitudes at β = 0."""
    return AmplitudeState(SQRT2, 0.0, 0.0, 0.0)


@pytest.fixture
def hex_state():
    """Hexagonal amplitudes at β = 0.9 (stable root)."""
    from app.services.asymptotics import stable_hex_amplitude
    a = stable_hex_amplitude(0.9)
    return AmplitudeState(a, a, a, 0.9)


@pytest.fixture
def short_schedule():
    """Compressed schedule for fast protocol tests."""
    return Schedule(t1=4.0, t2=6.0, t3=7.0, t4=8.0, t5=40.0, residual_tol=1e-6, settle_time=1.0)


@pytest.fixture(scope="session")
def relaxed_lamella():
    """Lamellar ū at (γ, m) = (3, 0) relaxed to residual 1e-7 on a 16² grid.

    The box holds one period of the fastest-growing wavenumber k² = γ²/2.
    """
    from app.services.pipeline.integrator import gradient_stable_until
    from domain.solver_state import SolverState

    gamma = 3.0
    k = gamma / SQRT2
    grid = GridSpec(16, 2.0 * math.pi / k)
    x, _ = grid.coordinates
    state = SolverState(field=RealField(grid, 0.6 * np.cos(k * x)), t=0.0, dt=0.05, gamma=gamma, m=0.0)
    relaxed, converged, _ = gradient_stable_until(state, 200.0, tolerance=1e-7)
    assert converged
    return relaxed.field
