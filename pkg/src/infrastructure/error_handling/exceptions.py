"""
Custom exception hierarchy for okphase.

Every error raised by the library carries a stable code, a human message and a
details dict so the CLI and the sweep writer can report failures uniformly.
"""

from typing import Any, Optional


class OkPhaseError(Exception):
    """
    Base exception for all okphase-specific errors.

    Attributes:
        message: Human-readable error message
        code: Stable error code for logs and CLI output
        details: Additional error details
    """

    def __init__(
        self,
        message: str,
        code: str = "UNKNOWN_ERROR",
        details: Optional[dict] = None
    ):
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> dict:
        """Converts exception to dict for logging and record persistence."""
        return {
            "error_type": self.__class__.__name__,
            "code": self.code,
            "message": self.message,
            "details": self.details
        }


# ============================================================================
# VALIDATION ERRORS
# ============================================================================

class ValidationError(OkPhaseError):
    """Base class for input and precondition violations."""
    pass


class InvalidParameterError(ValidationError):
    """Raised when a model or run parameter is out of its domain."""

    def __init__(self, name: str, value: Any, reason: str = ""):
        super().__init__(
            message=f"Invalid {name}: {value}. {reason}".strip(),
            code="INVALID_PARAMETER",
            details={"name": name, "value": str(value), "reason": reason}
        )


class InvalidGridError(ValidationError):
    """Raised when N or L violate the grid invariants."""

    def __init__(self, n: Any, length: Any, reason: str = ""):
        super().__init__(
            message=f"Invalid grid N={n}, L={length}. {reason}".strip(),
            code="INVALID_GRID",
            details={"n": str(n), "length": str(length), "reason": reason}
        )


class NonFiniteFieldError(ValidationError):
    """Raised when a field holds NaN or infinite samples."""

    def __init__(self, count: int):
        super().__init__(
            message=f"Field contains {count} non-finite samples",
            code="NON_FINITE_FIELD",
            details={"count": count}
        )


class MassConstraintError(ValidationError):
    """Raised when a field's mean differs from the prescribed mass."""

    def __init__(self, expected: float, actual: float, tolerance: float):
        super().__init__(
            message=(
                f"Mass constraint violated: mean {actual:.3e} "
                f"differs from {expected:.3e} by more than {tolerance:.1e}"
            ),
            code="MASS_CONSTRAINT",
            details={"expected": expected, "actual": actual, "tolerance": tolerance}
        )


class AsymmetricSpectrumError(ValidationError):
    """Raised when an inverse transform leaves a significant imaginary part."""

    def __init__(self, residue: float, tolerance: float):
        super().__init__(
            message=f"Coefficients are not conjugate-symmetric: imaginary residue {residue:.3e}",
            code="ASYMMETRIC_SPECTRUM",
            details={"residue": residue, "tolerance": tolerance}
        )


class SingularMultiplierError(ValidationError):
    """Raised when a multiplier singular at k=0 meets a nonzero mean."""

    def __init__(self, zero_mode: float):
        super().__init__(
            message=f"Singular multiplier applied to field with zero mode {zero_mode:.3e}",
            code="SINGULAR_MULTIPLIER",
            details={"zero_mode": zero_mode}
        )


class IncommensurateBoxError(ValidationError):
    """Raised when the box cannot carry the requested ansatz wavevectors."""

    def __init__(self, length: float, reason: str):
        super().__init__(
            message=f"Box length {length:.6g} is incommensurate: {reason}",
            code="INCOMMENSURATE_BOX",
            details={"length": length, "reason": reason}
        )


class ContinuationStartError(ValidationError):
    """Raised when continuation starts from a state that is not stationary."""

    def __init__(self, residual: float, tolerance: float):
        super().__init__(
            message=f"Starting state residual {residual:.3e} exceeds {tolerance:.1e}",
            code="CONTINUATION_START",
            details={"residual": residual, "tolerance": tolerance}
        )


# ============================================================================
# NUMERICAL ERRORS
# ============================================================================

class NumericalError(OkPhaseError):
    """Base class for failures inside the time steppers and solvers."""
    pass


class StepRejectedError(NumericalError):
    """Raised when a single time step cannot be accepted."""

    def __init__(self, stepper: str, dt: float, reason: str):
        super().__init__(
            message=f"{stepper} step rejected at dt={dt:.3e}: {reason}",
            code="STEP_REJECTED",
            details={"stepper": stepper, "dt": dt, "reason": reason}
        )


class StepperAbortError(NumericalError):
    """Raised when repeated step halving fails to produce an acceptable step."""

    def __init__(self, stepper: str, attempts: list, t: Optional[float] = None):
        last = attempts[-1] if attempts else {}
        super().__init__(
            message=(
                f"{stepper} aborted after {len(attempts)} attempts"
                f" (last dt={last.get('dt', float('nan')):.3e}: {last.get('reason', 'unknown')})"
            ),
            code="STEPPER_ABORT",
            details={"stepper": stepper, "attempts": attempts, "t": t}
        )


# ============================================================================
# STORAGE ERRORS
# ============================================================================

class StorageError(OkPhaseError):
    """Base class for persistence errors."""
    pass


class FieldFormatError(StorageError):
    """Raised when a field dump is malformed."""

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Malformed field dump {path}: {reason}",
            code="FIELD_FORMAT",
            details={"path": path, "reason": reason}
        )


class CheckpointError(StorageError):
    """Raised when checkpoint metadata is missing or incomplete."""

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Unusable checkpoint {path}: {reason}",
            code="CHECKPOINT_ERROR",
            details={"path": path, "reason": reason}
        )


# ============================================================================
# CLI MESSAGES AND EXIT CODES
# ============================================================================

ERROR_MESSAGES = {
    "INVALID_PARAMETER": "Invalid parameter",
    "INVALID_GRID": "Invalid grid",
    "NON_FINITE_FIELD": "Field contains non-finite values",
    "MASS_CONSTRAINT": "Mass constraint violated",
    "ASYMMETRIC_SPECTRUM": "Corrupted spectral state",
    "SINGULAR_MULTIPLIER": "Singular multiplier misuse",
    "INCOMMENSURATE_BOX": "Box incommensurate with pattern",
    "CONTINUATION_START": "Continuation start is not stationary",
    "STEP_REJECTED": "Time step rejected",
    "STEPPER_ABORT": "Time stepper aborted",
    "FIELD_FORMAT": "Malformed field file",
    "CHECKPOINT_ERROR": "Unusable checkpoint",
}

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def get_user_friendly_message(exception: Exception) -> str:
    """
    Builds a one-line message for CLI output.

    Args:
        exception: Exception instance (OkPhaseError or standard Exception)

    Returns:
        "<short title>: <message>" for known codes, otherwise a generic message
    """
    if isinstance(exception, OkPhaseError):
        title = ERROR_MESSAGES.get(exception.code)
        if title is None:
            return exception.message
        return f"{title}: {exception.message}"
    return f"An error occurred: {exception}"


def exit_code_for(exception: Exception) -> int:
    """Maps an exception to the CLI exit code."""
    if isinstance(exception, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_VALIDATION
