"""
Prometheus Metrics
Counters and histograms for time stepping, protocol runs and sweeps
"""
from prometheus_client import Counter, Histogram, Gauge, Info
from infrastructure.logging_config import get_logger

logger = get_logger(__name__)

# Stepper metrics
steps_total = Counter(
    'okphase_steps_total',
    'Total number of accepted time steps',
    ['stepper']
)

step_rejections_total = Counter(
    'okphase_step_rejections_total',
    'Total number of rejected time steps',
    ['stepper', 'reason']
)

fixed_point_iterations = Histogram(
    'okphase_fixed_point_iterations',
    'Inner iterations per gradient-stable step',
    buckets=[1, 2, 5, 10, 20, 30, 50]
)

# Continuation metrics
newton_iterations_total = Counter(
    'okphase_newton_iterations_total',
    'Total number of Newton iterations during continuation'
)

# Protocol metrics
runs_total = Counter(
    'okphase_runs_total',
    'Total number of completed protocol runs',
    ['label']
)

run_failures_total = Counter(
    'okphase_run_failures_total',
    'Total number of protocol runs that aborted',
    ['code']
)

run_duration_seconds = Histogram(
    'okphase_run_duration_seconds',
    'Wall time of one protocol run',
    buckets=[1, 5, 15, 30, 60, 120, 300, 600, 1800]
)

# Sweep metrics
sweep_pending_runs = Gauge(
    'okphase_sweep_pending_runs',
    'Runs submitted to the worker pool and not yet written'
)

app_info = Info(
    'okphase',
    'Application information'
)

app_info.info({
    'version': '1.0.0',
    'name': 'okphase',
})


def observe_run(record) -> None:
    """Count a finished run; called where records are collected, not in workers."""
    run_duration_seconds.observe(record.wall_s)
    if record.failed:
        run_failures_total.labels(code=record.error_code or 'UNKNOWN').inc()
    else:
        runs_total.labels(label=record.label).inc()


logger.debug("Prometheus metrics initialized")
