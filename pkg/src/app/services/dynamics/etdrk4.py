"""
Fourth-order exponential time differencing Runge-Kutta (Cox-Matthews).

The stiff linear part λ(|k|²) is integrated exactly; the φ-function
coefficients are evaluated by averaging over a circle of radius 1 around each
λΔt, which avoids cancellation for small |λΔt|.
"""
import logging
from functools import lru_cache

import numpy as np

from app.services.dynamics.operators import linear_symbol, nonlinear_spectrum
from app.services.spectral_core import dealias_mask, to_physical, to_spectral
from domain.fields import GridSpec, RealField
from domain.solver_state import SolverState, Stepper
from infrastructure.error_handling.exceptions import StepRejectedError

logger = logging.getLogger(__name__)

CONTOUR_POINTS = 32
OVERFLOW_BOUND = 1e6


class Etdrk4Stepper:
    """
    ETDRK4 coefficients for one (grid, γ, m, Δt) and the step built on them.

    Operates on raw coefficient arrays of ū in numpy FFT order.
    """

    def __init__(
        self,
        grid: GridSpec,
        gamma: float,
        m: float,
        dt: float,
        include_nonlinear: bool = True,
        dealias: bool = False
    ):
        self.grid = grid
        self.gamma = gamma
        self.m = m
        self.dt = dt
        self.include_nonlinear = include_nonlinear
        self.mask = dealias_mask(grid) if dealias else None
        self.linear = linear_symbol(grid, gamma, m)
        self._compute_coefficients()

    def _compute_coefficients(self):
        h = self.dt
        hl = h * self.linear
        r = np.exp(2j * np.pi * (np.arange(1, CONTOUR_POINTS + 1) - 0.5) / CONTOUR_POINTS)
        lr = hl[..., None] + r
        exp_lr = np.exp(lr)
        lr3 = lr ** 3

        self.E = np.exp(hl)
        self.E2 = np.exp(hl / 2.0)
        self.Q = h * np.mean((np.exp(lr / 2.0) - 1.0) / lr, axis=-1).real
        self.f1 = h * np.mean((-4.0 - lr + exp_lr * (4.0 - 3.0 * lr + lr ** 2)) / lr3, axis=-1).real
        self.f2 = h * np.mean((2.0 + lr + exp_lr * (-2.0 + lr)) / lr3, axis=-1).real
        self.f3 = h * np.mean((-4.0 - 3.0 * lr - lr ** 2 + exp_lr * (4.0 - lr)) / lr3, axis=-1).real

    def nonlinear(self, v: np.ndarray) -> np.ndarray:
        if not self.include_nonlinear:
            return np.zeros_like(v)
        return nonlinear_spectrum(v, self.grid, self.m, self.mask)

    def step(self, v: np.ndarray) -> np.ndarray:
        """
        Advance coefficients of ū by one step.

        Raises:
            StepRejectedError: on NaN or overflow
        """
        E, E2, Q = self.E, self.E2, self.Q
        Nv = self.nonlinear(v)
        a = E2 * v + Q * Nv
        Na = self.nonlinear(a)
        b = E2 * v + Q * Na
        Nb = self.nonlinear(b)
        c = E2 * a + Q * (2.0 * Nb - Nv)
        Nc = self.nonlinear(c)
        v_new = E * v + Nv * self.f1 + 2.0 * (Na + Nb) * self.f2 + Nc * self.f3
        v_new[0, 0] = 0.0

        if not np.all(np.isfinite(v_new)):
            raise StepRejectedError(Stepper.ETDRK4.value, self.dt, "non-finite coefficients")
        if np.max(np.abs(v_new)) > OVERFLOW_BOUND:
            raise StepRejectedError(Stepper.ETDRK4.value, self.dt, "overflow")
        return v_new


@lru_cache(maxsize=32)
def get_etdrk4_stepper(grid: GridSpec, gamma: float, m: float, dt: float, dealias: bool = False) -> Etdrk4Stepper:
    """Cached stepper; coefficients depend only on the arguments."""
    logger.debug(f"Computing ETDRK4 coefficients for N={grid.n}, L={grid.length:.4f}, dt={dt:.3e}")
    return Etdrk4Stepper(grid, gamma, m, dt, dealias=dealias)


def etdrk4_step(state: SolverState, dealias: bool = False) -> SolverState:
    """One ETDRK4 step of size state.dt; ``dealias`` masks the nonlinear term by the 2/3 rule."""
    stepper = get_etdrk4_stepper(state.grid, state.gamma, state.m, state.dt, dealias)
    v_new = stepper.step(to_spectral(state.field.values))
    return state.evolve(
        field=RealField(state.grid, to_physical(v_new)),
        t=state.t + state.dt,
        stepper=Stepper.ETDRK4,
    )
