"""
Continuation Branch Repository.
"""
from pathlib import Path
from typing import Union

import pandas as pd

from domain.records import ContinuationBranch
from infrastructure.logging_config import get_logger

logger = get_logger(__name__)

BRANCH_COLUMNS = ("gamma", "m", "E_paper", "E_diss", "residual", "u_half_range", "newton_iterations")


class BranchRepository:
    """One CSV row per converged branch point."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def save(self, branch: ContinuationBranch) -> int:
        rows = [
            {
                "gamma": p.gamma,
                "m": p.m,
                "E_paper": p.energy.e_paper,
                "E_diss": p.energy.e_diss,
                "residual": p.residual,
                "u_half_range": p.u_half_range,
                "newton_iterations": p.newton_iterations,
            }
            for p in branch.points
        ]
        self.path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows, columns=list(BRANCH_COLUMNS)).to_csv(self.path, index=False, float_format="%.12g")
        logger.info(f"Saved {len(rows)} branch points to {self.path}")
        return len(rows)

    def load(self) -> pd.DataFrame:
        return pd.read_csv(self.path)
