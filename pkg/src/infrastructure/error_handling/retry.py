"""
Step retry with geometric time-step shrinking.

A rejected time step is retried with a smaller Δt instead of waiting: each
retry multiplies Δt by ``shrink_factor``. When the halving budget is used up
the caller gets a StepperAbortError carrying the full attempt history.
"""

import logging
from typing import Callable, Tuple, Type, TypeVar

from infrastructure.error_handling.exceptions import StepRejectedError, StepperAbortError
from infrastructure.logging.structured_logger import get_structured_logger
from infrastructure.monitoring import prometheus_metrics

logger = logging.getLogger(__name__)
structured_logger = get_structured_logger(__name__)

T = TypeVar('T')


class RetryConfig:
    """
    Configuration for step retry.
    """

    def __init__(
        self,
        max_halvings: int = 5,
        shrink_factor: float = 0.5,
        retryable_exceptions: Tuple[Type[Exception], ...] = (StepRejectedError,)
    ):
        """
        Initialize retry config.

        Args:
            max_halvings: How many times Δt may shrink before aborting
            shrink_factor: Multiplier applied to Δt on each retry, in (0, 1)
            retryable_exceptions: Exceptions that trigger a retry
        """
        if not 0.0 < shrink_factor < 1.0:
            raise ValueError(f"shrink_factor must lie in (0, 1), got {shrink_factor}")
        if max_halvings < 0:
            raise ValueError(f"max_halvings must be non-negative, got {max_halvings}")
        self.max_halvings = max_halvings
        self.shrink_factor = shrink_factor
        self.retryable_exceptions = retryable_exceptions

    @property
    def max_attempts(self) -> int:
        return self.max_halvings + 1

    def calculate_dt(self, dt: float, attempt: int) -> float:
        """
        Time step for the given attempt.

        Args:
            dt: Requested time step
            attempt: Attempt number (0-indexed)

        Returns:
            dt * shrink_factor ** attempt
        """
        return dt * (self.shrink_factor ** attempt)


DEFAULT_STEP_RETRY = RetryConfig(max_halvings=5)

# Used where a rejected step must surface immediately (order studies, tests).
STRICT_STEP_RETRY = RetryConfig(max_halvings=0)


def retry_with_smaller_step(
    step: Callable[[float], T],
    dt: float,
    stepper: str,
    config: RetryConfig = DEFAULT_STEP_RETRY
) -> Tuple[T, float]:
    """
    Call ``step(dt)``, shrinking dt after each rejection.

    Args:
        step: Callable taking a time step and returning the step result
        dt: Initial time step
        stepper: Stepper name for diagnostics
        config: RetryConfig instance

    Returns:
        (result, dt actually used)

    Raises:
        StepperAbortError: if every attempt was rejected
    """
    attempts = []

    for attempt in range(config.max_attempts):
        trial_dt = config.calculate_dt(dt, attempt)
        try:
            result = step(trial_dt)

            if attempt > 0:
                logger.info(f"{stepper} step accepted after {attempt} halvings (dt={trial_dt:.3e})")

            return result, trial_dt

        except config.retryable_exceptions as e:
            reason = getattr(e, "details", {}).get("reason", str(e))
            attempts.append({"dt": trial_dt, "reason": reason})
            prometheus_metrics.step_rejections_total.labels(stepper=stepper, reason=reason.split(":")[0]).inc()
            structured_logger.log_step_rejection(stepper, attempt + 1, trial_dt, reason)

            if attempt < config.max_attempts - 1:
                logger.debug(
                    f"{stepper} attempt {attempt + 1}/{config.max_attempts} rejected: {reason}. "
                    f"Retrying with dt={config.calculate_dt(dt, attempt + 1):.3e}"
                )
            else:
                logger.error(f"All {config.max_attempts} {stepper} attempts rejected. Last: {reason}")

    raise StepperAbortError(stepper, attempts)
