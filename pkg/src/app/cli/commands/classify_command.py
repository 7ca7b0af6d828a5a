"""
``classify``: label a stored field.
"""
import argparse

from app.services.classification import classify_field
from infrastructure.error_handling.exceptions import EXIT_OK
from infrastructure.settings import Settings
from infrastructure.storage import read_field


def register(subparsers) -> None:
    parser = subparsers.add_parser("classify", help="label a field dump")
    parser.add_argument("field_file")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    result = classify_field(read_field(args.field_file))
    k_star = "nan" if result.k_star is None else f"{result.k_star:.3f}"
    print(f"{result.label.value} {result.peaks} {k_star}")
    return EXIT_OK
