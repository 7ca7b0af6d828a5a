"""
``sweep``: phase diagram over a rectangle of the (m, γ) plane.
"""
import argparse
import asyncio

from app.cli.commands.common import add_output_flags, add_schedule_flags, build_schedule, grid_size, output_dir
from app.services.pipeline import SweepService, fluctuation_stat
from domain.params import SweepRegion, build
from infrastructure.error_handling.exceptions import EXIT_OK
from infrastructure.logging_config import get_logger
from infrastructure.monitoring.metrics_server import start_metrics_server
from infrastructure.repositories.run_record_repository import RunRecordRepository
from infrastructure.settings import Settings

logger = get_logger(__name__)

SWEEP_FILE = "sweep.csv"
RUNS_SUBDIR = "runs"


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="sample the phase diagram with edge refinement")
    parser.add_argument("--gamma-min", dest="gamma_min", type=float, required=True)
    parser.add_argument("--gamma-max", dest="gamma_max", type=float, required=True)
    parser.add_argument("--m-min", dest="m_min", type=float, required=True)
    parser.add_argument("--m-max", dest="m_max", type=float, required=True)
    parser.add_argument("--count", type=int, default=60, help="initial random points")
    parser.add_argument("--rounds", type=int, default=2, help="refinement rounds")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--jobs", type=int, help="worker processes (default: OKPHASE_JOBS or 1)")
    parser.add_argument("--metrics-port", dest="metrics_port", type=int, help="expose Prometheus metrics")
    parser.add_argument("--fluctuations", action="store_true", help="print mean half-range of u per gamma")
    parser.add_argument("--dumps", action="store_true", help="write per-run dumps, previews and checkpoints")
    add_output_flags(parser)
    add_schedule_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    region = build(SweepRegion, m_min=args.m_min, m_max=args.m_max, gamma_min=args.gamma_min, gamma_max=args.gamma_max)
    schedule = build_schedule(args)
    jobs = args.jobs if args.jobs is not None else settings.jobs
    metrics_port = args.metrics_port if args.metrics_port is not None else settings.metrics_port
    out = output_dir(args, settings)

    csv_path = out / SWEEP_FILE
    if csv_path.exists():
        logger.warning(f"Overwriting {csv_path}")
        csv_path.unlink()

    service = SweepService(
        region,
        args.seed,
        schedule=schedule,
        n=grid_size(args, settings),
        jobs=jobs,
        repository=RunRecordRepository(csv_path),
        output_dir=out / RUNS_SUBDIR if args.dumps else None,
        timing=args.timing,
    )
    if metrics_port is not None:
        start_metrics_server(metrics_port)

    diagram = asyncio.run(service.run(args.count, args.rounds))

    counts = {}
    for label in diagram.labels():
        counts[label] = counts.get(label, 0) + 1
    print(f"{len(diagram.records)} runs in {diagram.generations + 1} generations -> {csv_path}")
    for label in sorted(counts):
        print(f"{label} {counts[label]}")

    if args.fluctuations:
        for gamma, half_range in fluctuation_stat(diagram.records).items():
            print(f"gamma={gamma:.6g} half_range={half_range:.6f}")
    return EXIT_OK
