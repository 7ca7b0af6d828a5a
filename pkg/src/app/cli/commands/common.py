"""
Flags and helpers shared by several commands.
"""
import argparse
from pathlib import Path
from typing import Any, Dict, Optional

from domain.params import Schedule, build
from infrastructure.settings import Settings, read_key_value_file

SCHEDULE_KEYS = (
    "t1", "t2", "t3", "t4", "t5", "rho", "residual_tol",
    "noise_amplitude_factor", "settle_time", "refit_repeats", "dealias",
)


def add_schedule_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("schedule")
    for name in ("t1", "t2", "t3", "t4", "t5"):
        group.add_argument(f"--{name}", type=float, help=f"phase boundary {name}")
    group.add_argument("--rho", type=float, help="spectral weighting strength in [0, 1); 0 disables weighting")
    group.add_argument("--residual-tol", dest="residual_tol", type=float, help="convergence tolerance on ‖u_t‖₂")
    group.add_argument("--refit-repeats", dest="refit_repeats", type=int, help="domain refit cycles")
    group.add_argument("--dealias", action="store_true", default=None, help="2/3-rule dealiasing of the ETDRK4 nonlinear term")


def add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--no-timing", dest="timing", action="store_false", help="record wall_s as 0")
    parser.add_argument("--n", type=int, help="grid size N (even)")


def build_schedule(args: argparse.Namespace) -> Schedule:
    """Schedule from defaults, then the master config file, then flags."""
    values: Dict[str, Any] = {}
    if getattr(args, "config", None):
        file_values = read_key_value_file(args.config)
        values.update({k: v for k, v in file_values.items() if k in SCHEDULE_KEYS})
    for key in SCHEDULE_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return build(Schedule, **values)


def output_dir(args: argparse.Namespace, settings: Settings) -> Path:
    return Path(args.out) if getattr(args, "out", None) else settings.output_dir


def grid_size(args: argparse.Namespace, settings: Settings) -> int:
    n: Optional[int] = getattr(args, "n", None)
    return n if n is not None else settings.grid_n


def format_float(value: float) -> str:
    return f"{value:.12g}"
