"""
``asymptotics``: stability thresholds of the amplitude equations.
"""
import argparse
from dataclasses import asdict

import numpy as np
import pandas as pd

from app.cli.commands.common import output_dir
from app.services.asymptotics import landscape, scan_thresholds, stability_regions
from infrastructure.error_handling.exceptions import EXIT_OK, InvalidParameterError
from infrastructure.settings import Settings

THRESHOLD_NAMES = ("lam_lin_hi", "hex_lin_lo", "hex_lin_hi", "dis_lin_lo", "lam_glob_hi", "hex_glob_hi")
LANDSCAPE_FILE = "landscape.csv"


def register(subparsers) -> None:
    parser = subparsers.add_parser("asymptotics", help="print the six beta thresholds")
    parser.add_argument("--beta-scan", dest="beta_scan", action="store_true",
                        help="also write the Lyapunov landscape and brute-force thresholds")
    parser.add_argument("--beta-max", dest="beta_max", type=float, default=1.3)
    parser.add_argument("--beta-step", dest="beta_step", type=float, default=1e-4)
    parser.add_argument("--out", help="output directory for the landscape CSV")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    thresholds = stability_regions().thresholds()
    if not args.beta_scan:
        for name, value in zip(THRESHOLD_NAMES, thresholds):
            print(f"{name} {value:.6f}")
        return EXIT_OK

    if not args.beta_step > 0:
        raise InvalidParameterError("beta_step", args.beta_step, "must be positive")
    if not args.beta_max > max(thresholds):
        raise InvalidParameterError("beta_max", args.beta_max, f"must exceed {max(thresholds):.6f}")

    scanned = scan_thresholds(args.beta_max, args.beta_step)
    for name, exact, found in zip(THRESHOLD_NAMES, thresholds, scanned):
        print(f"{name} {exact:.6f} scan={found:.6f}")

    betas = np.arange(0.0, args.beta_max + args.beta_step / 2.0, args.beta_step)
    path = output_dir(args, settings) / LANDSCAPE_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([asdict(p) for p in landscape(betas)]).to_csv(path, index=False, float_format="%.12g")
    print(f"landscape -> {path}")
    return EXIT_OK
