"""
Phase-diagram sweep with edge refinement.

Runs are independent and fan out to a process pool bounded by ``jobs``.
Results are written through a single writer in submission order, so the CSV
does not depend on completion order.
"""
import asyncio
import math
from collections import defaultdict
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.services.pipeline.protocol import run_protocol
from domain.params import DEFAULT_GRID_N, Schedule, SweepRegion
from domain.records import FAILED_LABEL, STATUS_FAILED, PhaseDiagram, RunRecord
from infrastructure.error_handling.exceptions import InvalidParameterError, OkPhaseError
from infrastructure.logging.structured_logger import get_structured_logger
from infrastructure.logging_config import get_logger
from infrastructure.monitoring import prometheus_metrics
from infrastructure.repositories.run_record_repository import RunRecordRepository

logger = get_logger(__name__)
structured_logger = get_structured_logger(__name__)

RADIUS_FRACTION = 1.0 / 20.0
POINT_DECIMALS = 12


@dataclass(frozen=True)
class RunRequest:
    """Everything a worker needs for one run."""

    gamma: float
    m: float
    seed: int
    schedule: Schedule
    n: int = DEFAULT_GRID_N
    output_dir: Optional[str] = None
    timing: bool = True


UNEXPECTED_ERROR_CODE = "UNEXPECTED"


def failed_record(request: RunRequest, code: str) -> RunRecord:
    """Placeholder row for a run that produced no state."""
    return RunRecord(
        gamma=request.gamma,
        m=request.m,
        seed=request.seed,
        label=FAILED_LABEL,
        e_paper=math.nan,
        e_diss=math.nan,
        l_opt=math.nan,
        k_star=math.nan,
        residual=math.nan,
        wall_s=0.0,
        schedule=request.schedule,
        status=STATUS_FAILED,
        error_code=code,
    )


def execute_run(request: RunRequest) -> RunRecord:
    """Worker entry point; any error becomes a failed record."""
    try:
        return run_protocol(
            request.gamma,
            request.m,
            request.seed,
            request.schedule,
            n=request.n,
            output_dir=request.output_dir,
            timing=request.timing,
        )
    except OkPhaseError as e:
        logger.error(f"Run at gamma={request.gamma}, m={request.m} failed: {e.message}")
        return failed_record(request, e.code)
    except Exception as e:
        logger.exception(f"Run at gamma={request.gamma}, m={request.m} raised {type(e).__name__}: {e}")
        return failed_record(request, UNEXPECTED_ERROR_CODE)


def run_seed(master_seed: int, generation: int, index: int) -> int:
    """Seed of run ``index`` in ``generation``, independent of worker scheduling."""
    return int(np.random.SeedSequence(master_seed, spawn_key=(generation, index)).generate_state(1)[0])


def initial_points(region: SweepRegion, count: int, master_seed: int) -> List[Tuple[float, float]]:
    """``count`` uniform random (m, γ) points in the region."""
    rng = np.random.default_rng(np.random.SeedSequence(master_seed))
    ms = rng.uniform(region.m_min, region.m_max, count)
    gammas = rng.uniform(region.gamma_min, region.gamma_max, count)
    return [(float(m), float(g)) for m, g in zip(ms, gammas)]


def refinement_points(records: Sequence[RunRecord], radius: float) -> List[Tuple[float, float]]:
    """
    Midpoints of differently labeled record pairs closer than ``radius``.

    Failed records are ignored; midpoints that coincide with each other or with
    an existing record are dropped.
    """
    usable = [r for r in records if not r.failed]
    seen = {(round(r.m, POINT_DECIMALS), round(r.gamma, POINT_DECIMALS)) for r in records}
    points = []
    for i, first in enumerate(usable):
        for second in usable[i + 1:]:
            if first.label == second.label:
                continue
            if math.hypot(first.m - second.m, first.gamma - second.gamma) >= radius:
                continue
            m = 0.5 * (first.m + second.m)
            gamma = 0.5 * (first.gamma + second.gamma)
            key = (round(m, POINT_DECIMALS), round(gamma, POINT_DECIMALS))
            if key not in seen:
                seen.add(key)
                points.append((m, gamma))
    return points


class SweepService:
    """
    Runs the protocol over a region and refines near label changes.
    """

    def __init__(
        self,
        region: SweepRegion,
        master_seed: int,
        schedule: Optional[Schedule] = None,
        n: int = DEFAULT_GRID_N,
        jobs: int = 1,
        repository: Optional[RunRecordRepository] = None,
        output_dir: Optional[Union[str, Path]] = None,
        timing: bool = True,
        runner: Callable[[RunRequest], RunRecord] = execute_run,
        executor_factory: Optional[Callable[[int], Executor]] = None
    ):
        if jobs < 1:
            raise InvalidParameterError("jobs", jobs, "must be at least 1")
        self.region = region
        self.master_seed = int(master_seed)
        self.schedule = schedule or Schedule()
        self.n = n
        self.jobs = jobs
        self.repository = repository
        self.output_dir = str(output_dir) if output_dir is not None else None
        self.timing = timing
        self.runner = runner
        self.executor_factory = executor_factory or (lambda workers: ProcessPoolExecutor(max_workers=workers))

    def _requests(self, generation: int, points: Iterable[Tuple[float, float]]) -> List[RunRequest]:
        return [
            RunRequest(
                gamma=gamma,
                m=m,
                seed=run_seed(self.master_seed, generation, index),
                schedule=self.schedule,
                n=self.n,
                output_dir=self.output_dir,
                timing=self.timing,
            )
            for index, (m, gamma) in enumerate(points)
        ]

    def _write(self, record: RunRecord) -> None:
        prometheus_metrics.observe_run(record)
        if self.repository is not None:
            self.repository.append(record, timing=self.timing)

    async def _run_generation(self, generation: int, requests: List[RunRequest], executor: Optional[Executor]) -> List[RunRecord]:
        results: List[Optional[RunRecord]] = [None] * len(requests)

        if executor is None:
            for index, request in enumerate(requests):
                try:
                    results[index] = self.runner(request)
                except Exception as e:
                    logger.error(f"Run at gamma={request.gamma}, m={request.m} failed: {type(e).__name__}: {e}")
                    results[index] = failed_record(request, UNEXPECTED_ERROR_CODE)
                self._write(results[index])
                structured_logger.log_sweep_progress(generation, index + 1, len(requests))
            return results

        loop = asyncio.get_running_loop()
        semaphore = asyncio.Semaphore(self.jobs)

        async def submit(index: int, request: RunRequest) -> Tuple[int, RunRecord]:
            async with semaphore:
                prometheus_metrics.sweep_pending_runs.inc()
                try:
                    return index, await loop.run_in_executor(executor, self.runner, request)
                except Exception as e:
                    # The worker itself died (broken pool, unpicklable result).
                    logger.error(f"Worker for gamma={request.gamma}, m={request.m} failed: {type(e).__name__}: {e}")
                    return index, failed_record(request, UNEXPECTED_ERROR_CODE)
                finally:
                    prometheus_metrics.sweep_pending_runs.dec()

        # Reorder buffer: write strictly in submission order.
        buffered: Dict[int, RunRecord] = {}
        next_index = 0
        for future in asyncio.as_completed([submit(i, r) for i, r in enumerate(requests)]):
            index, record = await future
            buffered[index] = record
            while next_index in buffered:
                results[next_index] = buffered.pop(next_index)
                self._write(results[next_index])
                next_index += 1
                structured_logger.log_sweep_progress(generation, next_index, len(requests))
        return results

    async def run(self, n_initial: int, refinement_rounds: int = 0) -> PhaseDiagram:
        """
        Initial uniform generation followed by ``refinement_rounds`` edge refinements.

        Args:
            n_initial: Number of random points, ≥ 1
            refinement_rounds: Refinement generations, ≥ 0

        Returns:
            PhaseDiagram with every record in write order
        """
        if n_initial < 1:
            raise InvalidParameterError("n_initial", n_initial, "must be at least 1")
        if refinement_rounds < 0:
            raise InvalidParameterError("refinement_rounds", refinement_rounds, "must be non-negative")

        diagram = PhaseDiagram(region=self.region)
        radius = self.region.diameter * RADIUS_FRACTION
        executor = self.executor_factory(self.jobs) if self.jobs > 1 else None
        try:
            points = initial_points(self.region, n_initial, self.master_seed)
            for generation in range(refinement_rounds + 1):
                if not points:
                    logger.info(f"No refinement points in generation {generation}; sweep complete")
                    break
                logger.info(f"Sweep generation {generation}: {len(points)} runs")
                records = await self._run_generation(generation, self._requests(generation, points), executor)
                diagram.records.extend(records)
                diagram.generations = generation
                points = refinement_points(diagram.records, radius)
        finally:
            if executor is not None:
                executor.shutdown(wait=True)

        failed = sum(1 for r in diagram.records if r.failed)
        logger.info(f"Sweep finished: {len(diagram.records)} runs, {failed} failed, {diagram.generations} refinement rounds")
        return diagram


def sweep(
    region: SweepRegion,
    n_initial: int,
    master_seed: int,
    refinement_rounds: int = 0,
    **options
) -> PhaseDiagram:
    """Synchronous wrapper around SweepService.run."""
    return asyncio.run(SweepService(region, master_seed, **options).run(n_initial, refinement_rounds))


def fluctuation_stat(records: Sequence) -> Dict[float, float]:
    """
    Mean half-range (max u − min u)/2 per γ.

    Accepts RunRecords (failed ones are skipped) or continuation BranchPoints.

    Raises:
        InvalidParameterError: when no usable record is given
    """
    groups: Dict[float, List[float]] = defaultdict(list)
    for record in records:
        if getattr(record, "failed", False):
            continue
        value = float(record.u_half_range)
        if math.isfinite(value):
            groups[round(float(record.gamma), 10)].append(value)
    if not groups:
        raise InvalidParameterError("records", len(records), "no usable records")
    return {gamma: float(np.mean(values)) for gamma, values in sorted(groups.items())}
