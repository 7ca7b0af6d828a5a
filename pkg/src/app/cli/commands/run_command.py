"""
``run``: one protocol run at (γ, m).
"""
import argparse
import sys

from app.cli.commands.common import add_output_flags, add_schedule_flags, build_schedule, grid_size, output_dir
from app.services.pipeline import MinimizationProtocol
from infrastructure.error_handling.exceptions import EXIT_NUMERICAL, EXIT_OK
from infrastructure.logging_config import get_logger
from infrastructure.monitoring import prometheus_metrics
from infrastructure.repositories.run_record_repository import RunRecordRepository
from infrastructure.settings import Settings

logger = get_logger(__name__)

RUNS_FILE = "runs.csv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="minimize at one (gamma, m)")
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--m", type=float, required=True)
    parser.add_argument("--seed", type=int, default=0)
    add_output_flags(parser)
    add_schedule_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    out = output_dir(args, settings)
    # Validated before any compute.
    protocol = MinimizationProtocol(
        args.gamma,
        args.m,
        args.seed,
        build_schedule(args),
        n=grid_size(args, settings),
        output_dir=out,
        timing=args.timing,
    )
    record = protocol.run()
    prometheus_metrics.observe_run(record)
    RunRecordRepository(out / RUNS_FILE).append(record, timing=args.timing)

    print(f"{record.label} E_paper={record.e_paper:.10g} E_diss={record.e_diss:.10g} residual={record.residual:.3e}")
    if record.failed:
        print(f"Run aborted ({record.error_code}); partial record written", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK
