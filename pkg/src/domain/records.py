"""
Result records: energies, protocol runs, phase diagrams and continuation branches.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from domain.fields import RealField
from domain.params import Schedule, SweepRegion

RUN_RECORD_COLUMNS = (
    "gamma", "m", "beta", "label", "E_paper", "E_diss", "L_opt", "k_star",
    "residual", "seed", "wall_s", "u_half_range", "status", "error_code",
)

STATUS_OK = "ok"
STATUS_FAILED = "failed"
FAILED_LABEL = "Failed"


@dataclass(frozen=True)
class EnergyBreakdown:
    """
    The three energy integrals and the two totals built from them.

    i1 = ∫|∇u|², i2 = ∫(1−u²)²/4, i3 = ∫∫G(u−m)(u−m), all on a box of area ``area``.
    """

    i1: float
    i2: float
    i3: float
    e_paper: float
    e_diss: float
    area: float

    @property
    def diss_density(self) -> float:
        """E_diss per unit area."""
        return self.e_diss / self.area

    @property
    def paper_density(self) -> float:
        return self.e_paper / self.area

    def to_dict(self) -> Dict[str, float]:
        return {
            "E_paper": self.e_paper,
            "E_diss": self.e_diss,
            "I1": self.i1,
            "I2": self.i2,
            "I3": self.i3,
        }


@dataclass(frozen=True)
class OptimalLength:
    """Minimizer of the rescaled energy over the box length."""

    length: Optional[float]
    energy: Optional[float]
    degenerate: bool = False


@dataclass
class RunRecord:
    """
    Provenance and outcome of one protocol run.

    Energies, ``l_opt`` and ``k_star`` describe the lowest-energy state seen
    during the run, not necessarily the last one.
    """

    gamma: float
    m: float
    seed: int
    label: str
    e_paper: float
    e_diss: float
    l_opt: float
    k_star: float
    residual: float
    wall_s: float
    schedule: Schedule = field(default_factory=Schedule)
    beta: float = math.nan
    u_half_range: float = math.nan
    status: str = STATUS_OK
    error_code: str = ""
    snapshot: Optional[str] = None
    k_star_trace: Tuple[Tuple[float, float], ...] = ()
    refit_applied: bool = False

    @property
    def failed(self) -> bool:
        return self.status == STATUS_FAILED

    def to_row(self) -> Dict[str, Any]:
        """CSV row in column order."""
        return {
            "gamma": self.gamma,
            "m": self.m,
            "beta": self.beta,
            "label": self.label,
            "E_paper": self.e_paper,
            "E_diss": self.e_diss,
            "L_opt": self.l_opt,
            "k_star": self.k_star,
            "residual": self.residual,
            "seed": self.seed,
            "wall_s": self.wall_s,
            "u_half_range": self.u_half_range,
            "status": self.status,
            "error_code": self.error_code,
        }

    @classmethod
    def from_row(cls, row: Dict[str, Any]) -> "RunRecord":
        """Creates from a CSV row."""
        def number(key):
            value = row.get(key)
            return math.nan if value is None or value == "" else float(value)

        error_code = row.get("error_code")
        return cls(
            gamma=float(row["gamma"]),
            m=float(row["m"]),
            seed=int(row["seed"]),
            label=str(row["label"]),
            e_paper=number("E_paper"),
            e_diss=number("E_diss"),
            l_opt=number("L_opt"),
            k_star=number("k_star"),
            residual=number("residual"),
            wall_s=number("wall_s"),
            beta=number("beta"),
            u_half_range=number("u_half_range"),
            status=str(row.get("status") or STATUS_OK),
            error_code="" if error_code is None or (isinstance(error_code, float) and math.isnan(error_code)) else str(error_code),
        )


@dataclass
class PhaseDiagram:
    """Records of a sweep over a region of the (m, γ) plane."""

    region: SweepRegion
    records: List[RunRecord] = field(default_factory=list)
    generations: int = 0

    def labels(self) -> List[str]:
        return [r.label for r in self.records]


@dataclass(frozen=True)
class BranchPoint:
    """One converged stationary state on a continuation branch."""

    gamma: float
    m: float
    field: RealField
    energy: EnergyBreakdown
    residual: float
    newton_iterations: int

    @property
    def u_half_range(self) -> float:
        return self.field.half_range


@dataclass
class ContinuationBranch:
    """Stationary states traced in m; ``truncated`` is set when Newton failed early."""

    gamma: float
    points: List[BranchPoint] = field(default_factory=list)
    truncated: bool = False
    reason: str = ""
    label: str = ""

    @property
    def masses(self) -> List[float]:
        return [p.m for p in self.points]
