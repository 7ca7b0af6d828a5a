"""
``continue``: trace a stationary branch in m from a checkpoint.
"""
import argparse

from app.cli.commands.common import output_dir
from app.services.dynamics import continue_in_m
from infrastructure.error_handling.exceptions import EXIT_OK, InvalidParameterError
from infrastructure.logging_config import get_logger
from infrastructure.repositories.branch_repository import BranchRepository
from infrastructure.settings import Settings
from infrastructure.storage import load_checkpoint

logger = get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("continue", help="Newton-Krylov continuation in m")
    parser.add_argument("--from", dest="checkpoint", required=True, help="checkpoint written by run")
    parser.add_argument("--dm", type=float, required=True, help="mass increment (may be negative)")
    parser.add_argument("--steps", type=int, required=True)
    parser.add_argument("--label", default="", help="branch name")
    parser.add_argument("--out", help="output directory")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    if args.steps < 0:
        raise InvalidParameterError("steps", args.steps, "must be non-negative")
    if args.dm == 0.0:
        raise InvalidParameterError("dm", args.dm, "must be nonzero")

    checkpoint = load_checkpoint(args.checkpoint)
    state = checkpoint.state
    branch = continue_in_m(state.field, state.gamma, state.m, args.dm, args.steps, label=args.label)

    name = f"branch_{args.label}.csv" if args.label else "branch.csv"
    path = output_dir(args, settings) / name
    BranchRepository(path).save(branch)

    print(f"{len(branch.points)} points at gamma={state.gamma:.6g} -> {path}")
    if branch.truncated:
        print(f"truncated: {branch.reason}")
    return EXIT_OK
