"""Command-line surface."""
from .parser import build_parser, parse_and_dispatch

__all__ = ["build_parser", "parse_and_dispatch"]
