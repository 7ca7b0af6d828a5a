"""
Unit tests for the command-line surface.
"""

import math

import numpy as np
import pytest

from app.cli import parse_and_dispatch
from app.cli.commands.common import build_schedule
from app.cli.parser import build_parser
from app.services.asymptotics import ansatz_field
from domain.fields import RealField
from domain.solver_state import SolverState
from infrastructure.storage import save_checkpoint, write_field


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    """Run every command from an empty directory with a clean environment."""
    monkeypatch.chdir(tmp_path)
    for name in ("OKPHASE_JOBS", "OKPHASE_GRID_N", "OKPHASE_LOG_LEVEL", "OKPHASE_LOG_DIR", "OKPHASE_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def lamellar_dump(tmp_path, lamellar_grid, lamellar_state):
    return write_field(tmp_path / "lam.okf", ansatz_field(lamellar_state, 3.0, lamellar_grid))


@pytest.mark.unit
@pytest.mark.cli
class TestAsymptoticsCommand:
    """Tests for ``asymptotics``."""

    def test_prints_thresholds(self, capsys):
        """Test six named thresholds to six decimals."""
        assert parse_and_dispatch(["asymptotics"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()

        assert lines[0] == "lam_lin_hi 0.447214"
        assert lines[1] == "hex_lin_lo 0.242536"
        assert lines[2] == "hex_lin_hi 1.118034"
        assert lines[3] == "dis_lin_lo 1.000000"
        assert lines[4].startswith("lam_glob_hi 0.38")
        assert lines[5] == "hex_glob_hi 1.102822"

    def test_beta_scan(self, tmp_path, capsys):
        """Test the scan prints both values and writes the landscape."""
        code = parse_and_dispatch(["asymptotics", "--beta-scan", "--beta-step", "1e-3", "--out", str(tmp_path / "out")])
        out = capsys.readouterr().out

        assert code == 0
        assert "scan=" in out
        assert (tmp_path / "out" / "landscape.csv").exists()

    def test_beta_max_too_small(self, capsys):
        """Test a scan range missing a threshold is rejected."""
        assert parse_and_dispatch(["asymptotics", "--beta-scan", "--beta-max", "1.0"]) == 1
        assert "Invalid parameter" in capsys.readouterr().err


@pytest.mark.unit
@pytest.mark.cli
class TestFieldCommands:
    """Tests for ``classify`` and ``energy``."""

    def test_classify(self, lamellar_dump, capsys):
        """Test the label, peak count and k* line."""
        assert parse_and_dispatch(["classify", str(lamellar_dump)]) == 0

        assert capsys.readouterr().out.strip() == "Lamellae 2 1.414"

    def test_classify_uniform(self, tmp_path, small_grid, capsys):
        """Test a uniform field prints nan for k*."""
        path = write_field(tmp_path / "flat.okf", RealField.constant(small_grid, 0.3))

        assert parse_and_dispatch(["classify", str(path)]) == 0
        assert capsys.readouterr().out.strip() == "Disorder 0 nan"

    def test_classify_bad_file(self, tmp_path, capsys):
        """Test a malformed dump exits with 1."""
        path = tmp_path / "junk.okf"
        path.write_bytes(b"not a field")

        assert parse_and_dispatch(["classify", str(path)]) == 1
        assert "Malformed field file" in capsys.readouterr().err

    def test_energy(self, tmp_path, small_grid, capsys):
        """Test the breakdown of a uniform field."""
        path = write_field(tmp_path / "flat.okf", RealField.constant(small_grid, 0.2))

        assert parse_and_dispatch(["energy", str(path), "--gamma", "3", "--m", "0.2"]) == 0
        values = dict(line.split() for line in capsys.readouterr().out.strip().splitlines())

        expected_i2 = (2.0 * math.pi) ** 2 * (1.0 - 0.04) ** 2 / 4.0
        assert float(values["I2"]) == pytest.approx(expected_i2, rel=1e-10)
        assert float(values["I1"]) == 0.0
        assert float(values["E_paper"]) == pytest.approx(expected_i2, rel=1e-10)
        assert values["L_opt"] == "nan"

    def test_energy_mass_mismatch(self, tmp_path, small_grid, capsys):
        """Test a dump whose mean is not m is rejected."""
        path = write_field(tmp_path / "flat.okf", RealField.constant(small_grid, 0.2))

        assert parse_and_dispatch(["energy", str(path), "--gamma", "3", "--m", "0.1"]) == 1


@pytest.mark.unit
@pytest.mark.cli
class TestUsageErrors:
    """Tests for argument and validation failures."""

    def test_unknown_flag(self, capsys):
        """Test argparse errors exit with 1."""
        assert parse_and_dispatch(["run", "--gamma", "3", "--m", "0", "--bogus"]) == 1
        assert "unrecognized arguments" in capsys.readouterr().err

    def test_missing_command(self):
        """Test a command is required."""
        assert parse_and_dispatch([]) == 1

    def test_invalid_mass(self, capsys):
        """Test |m| ≥ 1 is rejected before any computation."""
        assert parse_and_dispatch(["run", "--gamma", "3", "--m", "1.5"]) == 1
        assert "Invalid parameter" in capsys.readouterr().err

    def test_unordered_schedule(self):
        """Test phase boundaries must be increasing."""
        assert parse_and_dispatch(["run", "--gamma", "3", "--m", "0", "--t1", "50", "--t2", "10"]) == 1

    def test_help(self, capsys):
        """Test --help exits cleanly."""
        assert parse_and_dispatch(["--help"]) == 0
        assert "sweep" in capsys.readouterr().out


@pytest.mark.unit
@pytest.mark.cli
class TestScheduleFlags:
    """Tests for schedule values reaching the protocol."""

    def test_dealias_flag(self):
        """Test --dealias switches the ETDRK4 mask on."""
        args = build_parser().parse_args(["run", "--gamma", "3", "--m", "0", "--dealias"])
        assert build_schedule(args).dealias is True

    def test_dealias_default_off(self):
        """Test dealiasing stays off without the flag."""
        args = build_parser().parse_args(["run", "--gamma", "3", "--m", "0"])
        assert build_schedule(args).dealias is False

    def test_dealias_from_config(self, tmp_path):
        """Test the config file key enables dealiasing."""
        config = tmp_path / "okphase.conf"
        config.write_text("dealias=true\nrho=0.2\n")
        args = build_parser().parse_args(["--config", str(config), "run", "--gamma", "3", "--m", "0"])
        schedule = build_schedule(args)
        assert schedule.dealias is True
        assert schedule.rho == 0.2


@pytest.mark.unit
@pytest.mark.cli
class TestContinueCommand:
    """Tests for ``continue`` failure paths."""

    def test_missing_meta(self, lamellar_dump, capsys):
        """Test a dump without metadata is not a checkpoint."""
        code = parse_and_dispatch(["continue", "--from", str(lamellar_dump), "--dm", "0.01", "--steps", "2"])

        assert code == 1
        assert "Unusable checkpoint" in capsys.readouterr().err

    def test_non_stationary_start(self, tmp_path, random_deviation, capsys):
        """Test a random checkpoint is rejected as a branch start."""
        state = SolverState(field=random_deviation, t=0.0, dt=0.1, gamma=3.0, m=0.0)
        path = save_checkpoint(tmp_path / "final.okf", state, seed=0)

        assert parse_and_dispatch(["continue", "--from", str(path), "--dm", "0.01", "--steps", "2"]) == 1
        assert "not stationary" in capsys.readouterr().err

    def test_zero_increment(self, lamellar_dump):
        """Test dm = 0 is rejected."""
        assert parse_and_dispatch(["continue", "--from", str(lamellar_dump), "--dm", "0", "--steps", "2"]) == 1

    def test_branch_written(self, tmp_path, relaxed_lamella, capsys):
        """Test a short branch from a stationary checkpoint."""
        state = SolverState(field=relaxed_lamella, t=0.0, dt=0.05, gamma=3.0, m=0.0)
        path = save_checkpoint(tmp_path / "final.okf", state, seed=0)

        code = parse_and_dispatch([
            "continue", "--from", str(path), "--dm", "0.01", "--steps", "2", "--label", "lam", "--out", str(tmp_path),
        ])

        assert code == 0
        assert (tmp_path / "branch_lam.csv").exists()
        assert capsys.readouterr().out.startswith("3 points at gamma=3")
