"""
Run Record Repository.

Append-only CSV of protocol runs in a fixed column order.
"""
import math
from pathlib import Path
from typing import Iterable, List, Union

import pandas as pd

from domain.records import RUN_RECORD_COLUMNS, RunRecord
from infrastructure.error_handling.exceptions import StorageError
from infrastructure.logging_config import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.12g"


class RunRecordRepository:
    """
    Repository for the sweep/run CSV.
    """

    def __init__(self, path: Union[str, Path]):
        if not str(path):
            raise ValueError("CSV path cannot be empty.")
        self.path = Path(path)

    def exists(self) -> bool:
        return self.path.exists() and self.path.stat().st_size > 0

    def append(self, record: RunRecord, timing: bool = True) -> None:
        self.append_many([record], timing=timing)

    def append_many(self, records: Iterable[RunRecord], timing: bool = True) -> int:
        """
        Append records, writing the header only to a new file.

        Args:
            records: Records in write order
            timing: When False, wall_s is written as 0

        Returns:
            Number of rows written
        """
        rows = [record.to_row() for record in records]
        if not rows:
            return 0
        frame = pd.DataFrame(rows, columns=list(RUN_RECORD_COLUMNS))
        if not timing:
            frame["wall_s"] = 0.0

        self.path.parent.mkdir(parents=True, exist_ok=True)
        header = not self.exists()
        frame.to_csv(self.path, mode="a", header=header, index=False, float_format=FLOAT_FORMAT, na_rep="nan")
        logger.debug(f"Appended {len(rows)} run records to {self.path}")
        return len(rows)

    def load(self) -> List[RunRecord]:
        """
        All records in file order.

        Raises:
            StorageError: if the file is missing columns
        """
        if not self.exists():
            return []
        frame = pd.read_csv(self.path, dtype={"label": str, "status": str, "error_code": str}, keep_default_na=False)
        missing = [c for c in RUN_RECORD_COLUMNS if c not in frame.columns]
        if missing:
            raise StorageError(f"{self.path} is missing columns: {', '.join(missing)}", code="CSV_FORMAT_ERROR")

        records = []
        for row in frame.to_dict(orient="records"):
            for key in ("E_paper", "E_diss", "L_opt", "k_star", "residual", "wall_s", "beta", "u_half_range"):
                row[key] = _to_float(row[key])
            records.append(RunRecord.from_row(row))
        return records


def _to_float(value) -> float:
    if isinstance(value, str):
        return math.nan if value.strip() in ("", "nan", "NaN") else float(value)
    return float(value)
