"""
Unit tests for the phase-diagram sweep.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor

import pytest
from prometheus_client import REGISTRY

from app.services.pipeline import SweepService, fluctuation_stat, refinement_points, sweep
from app.services.pipeline.sweep_service import (
    RADIUS_FRACTION,
    UNEXPECTED_ERROR_CODE,
    RunRequest,
    execute_run,
    initial_points,
    run_seed,
)
from domain.params import SweepRegion
from domain.records import FAILED_LABEL, STATUS_FAILED, RunRecord
from infrastructure.error_handling.exceptions import InvalidParameterError
from infrastructure.repositories.run_record_repository import RunRecordRepository

REGION = SweepRegion(m_min=-0.1, m_max=0.1, gamma_min=3.0, gamma_max=4.0)


def record(m, gamma, label, half_range=0.5, **overrides):
    values = dict(
        gamma=gamma, m=m, seed=0, label=label, e_paper=0.0, e_diss=0.0,
        l_opt=math.nan, k_star=math.nan, residual=0.0, wall_s=0.0, u_half_range=half_range,
    )
    values.update(overrides)
    return RunRecord(**values)


def split_runner(request: RunRequest) -> RunRecord:
    """Lamellae left of m = 0, HexSpots right of it."""
    return record(request.m, request.gamma, "Lamellae" if request.m < 0 else "HexSpots", seed=request.seed)


def slow_runner(request: RunRequest) -> RunRecord:
    """Finishes early submissions last."""
    time.sleep(0.02 if request.m < 0 else 0.0)
    return split_runner(request)


def uniform_runner(request: RunRequest) -> RunRecord:
    return record(request.m, request.gamma, "Disorder", seed=request.seed)


def threads(workers):
    return ThreadPoolExecutor(max_workers=workers)


def points_of(records):
    return [(r.m, r.gamma, r.seed) for r in records]


@pytest.mark.unit
@pytest.mark.pipeline
class TestSeedsAndPoints:
    """Tests for run_seed and initial_points."""

    def test_run_seed_deterministic(self):
        """Test seeds depend only on master seed, generation and index."""
        assert run_seed(1, 0, 3) == run_seed(1, 0, 3)
        assert len({run_seed(1, g, i) for g in range(3) for i in range(20)}) == 60

    def test_initial_points_in_region(self):
        """Test points are reproducible and inside the region."""
        points = initial_points(REGION, 25, 8)

        assert points == initial_points(REGION, 25, 8)
        assert all(REGION.contains(m, gamma) for m, gamma in points)


@pytest.mark.unit
@pytest.mark.pipeline
class TestRefinementPoints:
    """Tests for refinement_points."""

    def test_midpoint_of_close_pair(self):
        """Test a close differently labeled pair yields its midpoint."""
        records = [record(0.0, 3.0, "Lamellae"), record(0.02, 3.0, "HexSpots"), record(0.5, 3.0, "HexSpots")]

        assert refinement_points(records, 0.05) == [pytest.approx((0.01, 3.0))]

    def test_same_label_ignored(self):
        """Test equal labels never refine."""
        assert refinement_points([record(0.0, 3.0, "Lamellae"), record(0.01, 3.0, "Lamellae")], 0.05) == []

    def test_failed_records_ignored(self):
        """Test failed runs take no part in refinement."""
        failed = record(0.01, 3.0, FAILED_LABEL, status=STATUS_FAILED)

        assert refinement_points([record(0.0, 3.0, "Lamellae"), failed], 0.05) == []

    def test_duplicates_dropped(self):
        """Test coinciding midpoints and existing points are not repeated."""
        records = [
            record(0.0, 3.0, "Lamellae"),
            record(0.02, 3.0, "HexSpots"),
            record(0.01, 2.99, "Lamellae"),
            record(0.01, 3.01, "HexSpots"),
            record(0.01, 3.0, "Mixed"),
        ]

        points = refinement_points(records, 0.05)

        assert (0.01, 3.0) not in [(round(m, 12), round(g, 12)) for m, g in points]
        assert len(points) == len({(round(m, 12), round(g, 12)) for m, g in points})


@pytest.mark.unit
@pytest.mark.pipeline
class TestSweepService:
    """Tests for SweepService with stand-in runners."""

    async def test_uniform_labels_stop_refining(self):
        """Test a sweep with one label has a single generation."""
        service = SweepService(REGION, 3, runner=uniform_runner)

        diagram = await service.run(12, refinement_rounds=3)

        assert len(diagram.records) == 12
        assert diagram.generations == 0

    async def test_refinement_generation(self):
        """Test refinement runs are the midpoints of the first generation."""
        service = SweepService(REGION, 3, runner=split_runner)

        diagram = await service.run(40, refinement_rounds=1)
        first, refined = diagram.records[:40], diagram.records[40:]
        expected = refinement_points(first, REGION.diameter * RADIUS_FRACTION)

        assert [(r.m, r.gamma) for r in refined] == expected
        assert [r.seed for r in refined] == [run_seed(3, 1, i) for i in range(len(refined))]

    async def test_parallel_matches_serial(self, tmp_path):
        """Test write order does not depend on completion order."""
        serial_repo = RunRecordRepository(tmp_path / "serial.csv")
        parallel_repo = RunRecordRepository(tmp_path / "parallel.csv")

        serial = await SweepService(REGION, 5, runner=slow_runner, repository=serial_repo, timing=False).run(10)
        parallel = await SweepService(
            REGION, 5, jobs=4, runner=slow_runner, repository=parallel_repo,
            timing=False, executor_factory=threads,
        ).run(10)

        assert points_of(parallel.records) == points_of(serial.records)
        assert (tmp_path / "serial.csv").read_text() == (tmp_path / "parallel.csv").read_text()

    def test_sync_wrapper_deterministic(self):
        """Test equal master seeds give identical sweeps."""
        first = sweep(REGION, 8, 21, runner=split_runner)
        second = sweep(REGION, 8, 21, runner=split_runner)

        assert points_of(first.records) == points_of(second.records)

    async def test_invalid_counts(self):
        """Test the initial count and rounds are validated."""
        service = SweepService(REGION, 0, runner=uniform_runner)

        with pytest.raises(InvalidParameterError):
            await service.run(0)
        with pytest.raises(InvalidParameterError):
            await service.run(5, refinement_rounds=-1)

    def test_invalid_jobs(self):
        """Test at least one job is required."""
        with pytest.raises(InvalidParameterError):
            SweepService(REGION, 0, jobs=0)


@pytest.mark.unit
@pytest.mark.pipeline
class TestFluctuationStat:
    """Tests for fluctuation_stat."""

    def test_mean_per_gamma(self):
        """Test half-ranges are averaged per γ."""
        records = [record(0.0, 3.0, "Lamellae", 0.4), record(0.1, 3.0, "Lamellae", 0.6), record(0.0, 10.0, "Lamellae", 0.9)]

        assert fluctuation_stat(records) == {3.0: pytest.approx(0.5), 10.0: pytest.approx(0.9)}

    def test_failed_skipped(self):
        """Test failed records do not contribute."""
        records = [record(0.0, 3.0, "Lamellae", 0.4), record(0.0, 3.0, FAILED_LABEL, 5.0, status=STATUS_FAILED)]

        assert fluctuation_stat(records) == {3.0: pytest.approx(0.4)}

    def test_empty(self):
        """Test an empty input is rejected."""
        with pytest.raises(InvalidParameterError):
            fluctuation_stat([])


FAILING_SEED = run_seed(4, 0, 3)


def failing_protocol(gamma, m, seed, schedule, **options):
    """Raises a non-library error for one seed."""
    if seed == FAILING_SEED:
        raise ValueError("singular operator")
    return record(m, gamma, "HexSpots", seed=seed)


def raising_runner(request: RunRequest) -> RunRecord:
    if request.m < 0:
        raise RuntimeError("worker lost")
    return split_runner(request)


def sample(name, **labels):
    return REGISTRY.get_sample_value(name, labels) or 0.0


@pytest.mark.unit
@pytest.mark.pipeline
@pytest.mark.error_handling
class TestUnexpectedErrors:
    """Tests for runs that raise outside the library's error hierarchy."""

    def test_execute_run_returns_failed_record(self, monkeypatch, short_schedule):
        """Test a ValueError becomes a failed row instead of propagating."""
        monkeypatch.setattr("app.services.pipeline.sweep_service.run_protocol", failing_protocol)

        result = execute_run(RunRequest(gamma=3.0, m=-0.05, seed=FAILING_SEED, schedule=short_schedule, n=32))

        assert result.failed
        assert result.label == FAILED_LABEL
        assert result.error_code == UNEXPECTED_ERROR_CODE
        assert math.isnan(result.e_paper)

    async def test_sweep_writes_every_row(self, monkeypatch, tmp_path, short_schedule):
        """Test one raising run does not stop the rest of the sweep."""
        monkeypatch.setattr("app.services.pipeline.sweep_service.run_protocol", failing_protocol)
        repository = RunRecordRepository(tmp_path / "sweep.csv")

        diagram = await SweepService(REGION, 4, schedule=short_schedule, repository=repository, timing=False).run(10)
        stored = repository.load()

        assert len(stored) == 10
        assert [r.failed for r in stored] == [i == 3 for i in range(10)]
        assert stored[3].error_code == UNEXPECTED_ERROR_CODE
        assert stored[3].status == STATUS_FAILED
        assert stored[3].label == FAILED_LABEL
        assert points_of(stored) == points_of(diagram.records)

    async def test_parallel_worker_error(self, tmp_path):
        """Test a worker exception in the pool path becomes a failed row."""
        repository = RunRecordRepository(tmp_path / "sweep.csv")

        diagram = await SweepService(
            REGION, 4, jobs=3, runner=raising_runner, repository=repository,
            timing=False, executor_factory=threads,
        ).run(10)

        assert len(repository.load()) == 10
        for r in diagram.records:
            assert r.failed == (r.m < 0)
            if r.failed:
                assert r.error_code == UNEXPECTED_ERROR_CODE


@pytest.mark.unit
@pytest.mark.pipeline
class TestRunMetrics:
    """Tests for run counters updated as records are collected."""

    @pytest.mark.parametrize("jobs", [1, 3])
    async def test_runs_counted_once(self, jobs):
        """Test every collected record increments the run counter."""
        before = sample("okphase_runs_total", label="Disorder")

        await SweepService(REGION, 2, jobs=jobs, runner=uniform_runner, executor_factory=threads).run(7)

        assert sample("okphase_runs_total", label="Disorder") - before == 7

    async def test_failures_counted_by_code(self):
        """Test failed records increment the failure counter with their code."""
        before_failed = sample("okphase_run_failures_total", code=UNEXPECTED_ERROR_CODE)
        before_ok = sample("okphase_runs_total", label="HexSpots")

        diagram = await SweepService(REGION, 4, jobs=3, runner=raising_runner, executor_factory=threads).run(10)
        n_failed = sum(1 for r in diagram.records if r.failed)

        assert sample("okphase_run_failures_total", code=UNEXPECTED_ERROR_CODE) - before_failed == n_failed
        assert sample("okphase_runs_total", label="HexSpots") - before_ok == 10 - n_failed
