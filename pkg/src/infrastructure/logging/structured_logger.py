"""
Structured Logging for okphase
Provides JSON-formatted logs with run context (gamma, m, seed, phase)

Structured loggers live under the ``okphase.structured`` hierarchy, separate
from the plain module loggers. They carry no level of their own, so the level
set by ``setup_logging`` applies to both.
"""
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pythonjsonlogger import jsonlogger

STRUCTURED_ROOT = "okphase.structured"
STRUCTURED_LOG_FILE = "structured.log"


def _json_formatter() -> logging.Formatter:
    return jsonlogger.JsonFormatter(
        '%(asctime)s %(levelname)s %(name)s %(message)s',
        rename_fields={
            'asctime': 'timestamp',
            'levelname': 'level',
            'name': 'logger'
        }
    )


def _structured_root() -> logging.Logger:
    root = logging.getLogger(STRUCTURED_ROOT)
    if not root.handlers:
        root.propagate = False
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(_json_formatter())
        root.addHandler(console_handler)
    return root


def configure_structured_logging(log_dir: Optional[Union[str, Path]] = None) -> Optional[Path]:
    """
    Point the JSON file output at ``log_dir``; console only when None.

    Returns:
        Path of the structured log file, if any
    """
    root = _structured_root()
    for handler in [h for h in root.handlers if isinstance(h, logging.FileHandler)]:
        root.removeHandler(handler)
        handler.close()
    if log_dir is None:
        return None
    Path(log_dir).mkdir(parents=True, exist_ok=True)
    path = Path(log_dir) / STRUCTURED_LOG_FILE
    file_handler = logging.FileHandler(path)
    file_handler.setFormatter(_json_formatter())
    root.addHandler(file_handler)
    return path


class StructuredLogger:
    """
    Structured logger with JSON output and context management.
    """

    def __init__(self, name: str, level: Optional[int] = None):
        """
        Initialize structured logger.

        Args:
            name: Module name; the logger is ``okphase.structured.<name>``
            level: Optional level; by default the configured root level applies
        """
        _structured_root()
        self.logger = logging.getLogger(f"{STRUCTURED_ROOT}.{name}")
        if level is not None:
            self.logger.setLevel(level)
        self.context: Dict[str, Any] = {}

    def set_context(self, **kwargs):
        """
        Set context for all subsequent log messages.

        Args:
            **kwargs: Context key-value pairs
        """
        self.context.update(kwargs)

    def clear_context(self):
        """Clear all context."""
        self.context = {}

    def _merge_extra(self, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        merged = self.context.copy()
        if extra:
            merged.update(extra)
        return merged

    def info(self, message: str, **extra):
        self.logger.info(message, extra=self._merge_extra(extra))

    def warning(self, message: str, **extra):
        self.logger.warning(message, extra=self._merge_extra(extra))

    def error(self, message: str, error: Optional[Exception] = None, **extra):
        """Log error message with context."""
        if error:
            extra['error'] = str(error)
            extra['error_type'] = type(error).__name__
            code = getattr(error, 'code', None)
            if code:
                extra['error_code'] = code
        self.logger.error(message, extra=self._merge_extra(extra))

    def debug(self, message: str, **extra):
        self.logger.debug(message, extra=self._merge_extra(extra))

    # Convenience methods for common scenarios

    def log_phase(self, phase: str, t: float, dt: float, energy_density: float, **extra):
        """Log a protocol phase boundary."""
        self.info(
            f"Phase {phase} reached",
            phase=phase,
            t=t,
            dt=dt,
            energy_density=energy_density,
            **extra
        )

    def log_step_rejection(self, stepper: str, attempt: int, dt: float, reason: str, **extra):
        """Log a rejected time step."""
        self.warning(
            f"{stepper} step rejected",
            stepper=stepper,
            attempt=attempt,
            dt=dt,
            reason=reason,
            **extra
        )

    def log_run_complete(self, label: str, residual: float, duration: float, **extra):
        """Log a finished protocol run."""
        self.info(
            f"Run finished: {label}",
            label=label,
            residual=residual,
            duration=duration,
            **extra
        )

    def log_sweep_progress(self, generation: int, completed: int, total: int, **extra):
        """Log sweep progress."""
        self.info(
            f"Sweep generation {generation}: {completed}/{total} runs written",
            generation=generation,
            completed=completed,
            total=total,
            **extra
        )

    def log_newton_iteration(self, m: float, iteration: int, residual: float, krylov_info: int, **extra):
        """Log one Newton iteration of the continuation."""
        self.debug(
            f"Newton iteration {iteration} at m={m:.6f}",
            m=m,
            iteration=iteration,
            residual=residual,
            krylov_info=krylov_info,
            **extra
        )


def get_structured_logger(name: str) -> StructuredLogger:
    """
    Get or create a structured logger.

    Args:
        name: Logger name

    Returns:
        StructuredLogger instance
    """
    return StructuredLogger(name)
