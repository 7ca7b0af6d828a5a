"""CLI command modules"""
from . import (
    run_command,
    sweep_command,
    continue_command,
    asymptotics_command,
    classify_command,
    energy_command,
)

COMMANDS = (
    run_command,
    sweep_command,
    continue_command,
    asymptotics_command,
    classify_command,
    energy_command,
)

__all__ = [
    "COMMANDS",
    "run_command",
    "sweep_command",
    "continue_command",
    "asymptotics_command",
    "classify_command",
    "energy_command",
]
