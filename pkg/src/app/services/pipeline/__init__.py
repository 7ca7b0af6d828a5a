"""
Minimization protocol, domain refit and phase-diagram sweep.
"""
from .benchmark import HybridBenchmark, benchmark_hybrid
from .integrator import RunTracker, etdrk4_until, gradient_stable_until
from .protocol import MinimizationProtocol, initial_length, run_protocol
from .refit import RefitResult, domain_refit
from .sweep_service import SweepService, fluctuation_stat, refinement_points, sweep

__all__ = [
    "HybridBenchmark",
    "benchmark_hybrid",
    "RunTracker",
    "etdrk4_until",
    "gradient_stable_until",
    "MinimizationProtocol",
    "initial_length",
    "run_protocol",
    "RefitResult",
    "domain_refit",
    "SweepService",
    "fluctuation_stat",
    "refinement_points",
    "sweep",
]
