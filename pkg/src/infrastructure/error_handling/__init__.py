"""
Error Handling Infrastructure.

Provides the exception hierarchy, CLI exit-code mapping and step retry.
"""

from .exceptions import (
    OkPhaseError,
    ValidationError,
    InvalidParameterError,
    InvalidGridError,
    NonFiniteFieldError,
    MassConstraintError,
    AsymmetricSpectrumError,
    SingularMultiplierError,
    IncommensurateBoxError,
    ContinuationStartError,
    NumericalError,
    StepRejectedError,
    StepperAbortError,
    StorageError,
    FieldFormatError,
    CheckpointError,
    EXIT_OK,
    EXIT_VALIDATION,
    EXIT_NUMERICAL,
    get_user_friendly_message,
    exit_code_for,
)

from .retry import (
    RetryConfig,
    DEFAULT_STEP_RETRY,
    STRICT_STEP_RETRY,
    retry_with_smaller_step,
)

__all__ = [
    # Exceptions
    "OkPhaseError",
    "ValidationError",
    "InvalidParameterError",
    "InvalidGridError",
    "NonFiniteFieldError",
    "MassConstraintError",
    "AsymmetricSpectrumError",
    "SingularMultiplierError",
    "IncommensurateBoxError",
    "ContinuationStartError",
    "NumericalError",
    "StepRejectedError",
    "StepperAbortError",
    "StorageError",
    "FieldFormatError",
    "CheckpointError",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "EXIT_NUMERICAL",
    "get_user_friendly_message",
    "exit_code_for",
    # Retry
    "RetryConfig",
    "DEFAULT_STEP_RETRY",
    "STRICT_STEP_RETRY",
    "retry_with_smaller_step",
]
