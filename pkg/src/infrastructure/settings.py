"""
Application settings.

Values come from (lowest to highest precedence): built-in defaults, OKPHASE_*
environment variables (a .env file is loaded first), and a master config file
of plain ``key=value`` lines. CLI flags override all of them at the call site.
"""
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field, ValidationError as PydanticValidationError, field_validator

from infrastructure.error_handling.exceptions import InvalidParameterError
from infrastructure.logging_config import get_logger

logger = get_logger(__name__)

ENV_PREFIX = "OKPHASE_"


class Settings(BaseModel):
    """Runtime settings shared by all commands."""

    jobs: int = Field(default=1, ge=1, le=512)
    grid_n: int = Field(default=128, ge=8)
    log_level: str = "INFO"
    log_dir: Optional[Path] = None
    output_dir: Path = Path("okphase_out")
    metrics_port: Optional[int] = Field(default=None, ge=1, le=65535)

    @field_validator('log_level')
    @classmethod
    def log_level_must_be_known(cls, v):
        v = v.upper()
        if v not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level {v}")
        return v

    @field_validator('grid_n')
    @classmethod
    def grid_n_must_be_even(cls, v):
        if v % 2:
            raise ValueError("grid_n must be even")
        return v


def _from_environment() -> Dict[str, Any]:
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw not in (None, ""):
            values[name] = raw
    return values


def read_key_value_file(path: Union[str, Path]) -> Dict[str, str]:
    """Parse a plain ``key=value`` file; keys are lower-cased."""
    path = Path(path)
    if not path.is_file():
        raise InvalidParameterError("config", str(path), "file does not exist")
    return {key.strip().lower(): value for key, value in dotenv_values(path).items() if value is not None}


def load_settings(
    config_path: Optional[Union[str, Path]] = None,
    passthrough: Iterable[str] = (),
    **overrides: Any
) -> Settings:
    """
    Load settings from environment, optional master config file and overrides.

    Args:
        config_path: Master config file (``key=value`` lines)
        passthrough: Config keys consumed elsewhere (not warned about)
        **overrides: Explicit values (CLI flags); None values are ignored

    Returns:
        Validated Settings

    Raises:
        InvalidParameterError: on unknown keys or invalid values
    """
    load_dotenv()
    values: Dict[str, Any] = _from_environment()

    if config_path is not None:
        file_values = read_key_value_file(config_path)
        unknown = sorted(set(file_values) - set(Settings.model_fields) - set(passthrough))
        if unknown:
            logger.warning(f"Ignoring unknown config keys: {', '.join(unknown)}")
        values.update({k: v for k, v in file_values.items() if k in Settings.model_fields})

    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**values)
    except PydanticValidationError as e:
        first = e.errors()[0]
        name = ".".join(str(p) for p in first.get("loc", ())) or "settings"
        raise InvalidParameterError(name, first.get("input"), first.get("msg", "")) from e
