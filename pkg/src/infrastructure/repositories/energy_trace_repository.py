"""
Energy Trace Repository.
"""
from pathlib import Path
from typing import Sequence, Tuple, Union

import pandas as pd

from domain.records import EnergyBreakdown
from infrastructure.logging_config import get_logger

logger = get_logger(__name__)

TRACE_COLUMNS = ("t", "E_paper", "E_diss", "I1", "I2", "I3")


class EnergyTraceRepository:
    """Energy-over-time CSV of one protocol run."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def save(self, trace: Sequence[Tuple[float, EnergyBreakdown]]) -> int:
        rows = [{"t": t, **energy.to_dict()} for t, energy in trace]
        frame = pd.DataFrame(rows, columns=list(TRACE_COLUMNS))
        self.path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(self.path, index=False, float_format="%.12g")
        logger.debug(f"Saved {len(rows)} energy samples to {self.path}")
        return len(rows)

    def load(self) -> pd.DataFrame:
        return pd.read_csv(self.path)
