"""
``energy``: energy breakdown of a stored field.
"""
import argparse
import math

from app.cli.commands.common import format_float
from app.services.energy import optimal_length, total_energy, unit_domain_integrals
from domain.params import ModelParams, build
from infrastructure.error_handling.exceptions import EXIT_OK
from infrastructure.settings import Settings
from infrastructure.storage import read_field


def register(subparsers) -> None:
    parser = subparsers.add_parser("energy", help="evaluate E_paper and E_diss of a field dump")
    parser.add_argument("field_file")
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--m", type=float, required=True)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    build(ModelParams, gamma=args.gamma, m=args.m)
    u = read_field(args.field_file)
    energy = total_energy(u, args.gamma, args.m)
    i1, i2, i3 = unit_domain_integrals(energy, u.grid.length)
    optimum = optimal_length(i1, i3, args.gamma, i2)

    for key, value in energy.to_dict().items():
        print(f"{key} {format_float(value)}")
    print(f"E_paper/area {format_float(energy.paper_density)}")
    print(f"E_diss/area {format_float(energy.diss_density)}")
    print(f"L_opt {format_float(math.nan if optimum.degenerate else optimum.length)}")
    return EXIT_OK
