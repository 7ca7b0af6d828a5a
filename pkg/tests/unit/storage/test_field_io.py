"""
Unit tests for field dumps, PGM previews and checkpoints.
"""

import numpy as np
import pytest

from domain.fields import RealField
from domain.solver_state import SolverState, Stepper
from infrastructure.error_handling.exceptions import CheckpointError, FieldFormatError
from infrastructure.storage import load_checkpoint, read_field, save_checkpoint, write_field, write_pgm
from infrastructure.storage.field_io import HEADER_DTYPE


@pytest.mark.unit
@pytest.mark.storage
class TestFieldDump:
    """Tests for write_field and read_field."""

    def test_round_trip_is_exact(self, tmp_path, random_deviation):
        """Test samples and box survive bit for bit."""
        path = write_field(tmp_path / "u.okf", random_deviation.shifted(0.3))
        loaded = read_field(path)

        assert loaded.grid == random_deviation.grid
        assert np.array_equal(loaded.values, random_deviation.values + 0.3)

    def test_file_size(self, tmp_path, random_deviation):
        """Test the dump is the header plus N² doubles."""
        path = write_field(tmp_path / "u.okf", random_deviation)

        assert path.stat().st_size == HEADER_DTYPE.itemsize + 8 * 32 * 32
        assert path.read_bytes()[:4] == b"OKF1"

    def test_creates_parent_directories(self, tmp_path, random_deviation):
        """Test nested output paths are created."""
        path = write_field(tmp_path / "a" / "b" / "u.okf", random_deviation)

        assert path.exists()

    def test_bad_magic(self, tmp_path, random_deviation):
        """Test a foreign header is rejected."""
        path = write_field(tmp_path / "u.okf", random_deviation)
        raw = bytearray(path.read_bytes())
        raw[:4] = b"XXXX"
        path.write_bytes(bytes(raw))

        with pytest.raises(FieldFormatError):
            read_field(path)

    def test_truncated_payload(self, tmp_path, random_deviation):
        """Test a short payload is rejected."""
        path = write_field(tmp_path / "u.okf", random_deviation)
        path.write_bytes(path.read_bytes()[:-8])

        with pytest.raises(FieldFormatError):
            read_field(path)

    def test_short_header(self, tmp_path):
        """Test a file shorter than the header is rejected."""
        path = tmp_path / "u.okf"
        path.write_bytes(b"OKF1")

        with pytest.raises(FieldFormatError):
            read_field(path)

    def test_missing_file(self, tmp_path):
        """Test a missing file is a format error."""
        with pytest.raises(FieldFormatError):
            read_field(tmp_path / "absent.okf")


@pytest.mark.unit
@pytest.mark.storage
class TestPgm:
    """Tests for write_pgm."""

    def test_header_and_size(self, tmp_path, random_deviation):
        """Test the binary PGM header and payload length."""
        raw = write_pgm(tmp_path / "u.pgm", random_deviation).read_bytes()
        header = b"P5\n32 32\n255\n"

        assert raw.startswith(header)
        assert len(raw) == len(header) + 32 * 32

    def test_full_range(self, tmp_path, random_deviation):
        """Test pixels span 0 to 255."""
        raw = write_pgm(tmp_path / "u.pgm", random_deviation).read_bytes()
        pixels = np.frombuffer(raw[len(b"P5\n32 32\n255\n"):], dtype=np.uint8)

        assert pixels.min() == 0
        assert pixels.max() == 255

    def test_constant_field_is_grey(self, tmp_path, small_grid):
        """Test a constant field maps to mid-grey."""
        raw = write_pgm(tmp_path / "u.pgm", RealField.constant(small_grid, 0.2)).read_bytes()
        pixels = np.frombuffer(raw[len(b"P5\n32 32\n255\n"):], dtype=np.uint8)

        assert np.all(pixels == 128)


@pytest.mark.unit
@pytest.mark.storage
class TestCheckpoint:
    """Tests for save_checkpoint and load_checkpoint."""

    @pytest.fixture
    def state(self, random_deviation):
        return SolverState(field=random_deviation, t=12.5, dt=0.031, gamma=4.0, m=0.2, stepper=Stepper.GRADIENT_STABLE)

    def test_round_trip(self, tmp_path, state):
        """Test the state and seed are restored."""
        path = save_checkpoint(tmp_path / "final.okf", state, seed=42)
        checkpoint = load_checkpoint(path)

        assert checkpoint.seed == 42
        assert checkpoint.state.gamma == 4.0
        assert checkpoint.state.m == 0.2
        assert checkpoint.state.t == 12.5
        assert checkpoint.state.dt == 0.031
        assert checkpoint.state.stepper == Stepper.GRADIENT_STABLE
        assert np.allclose(checkpoint.state.field.values, state.field.values, atol=1e-14)

    def test_dump_holds_full_field(self, tmp_path, state):
        """Test the dump stores u = m + ū."""
        path = save_checkpoint(tmp_path / "final.okf", state, seed=1)

        assert read_field(path).mean == pytest.approx(0.2, abs=1e-12)

    def test_missing_meta(self, tmp_path, state):
        """Test a dump without its sidecar is rejected."""
        path = save_checkpoint(tmp_path / "final.okf", state, seed=1)
        path.with_suffix(".meta").unlink()

        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_missing_key(self, tmp_path, state):
        """Test incomplete metadata is rejected."""
        path = save_checkpoint(tmp_path / "final.okf", state, seed=1)
        meta = path.with_suffix(".meta")
        meta.write_text("".join(line + "\n" for line in meta.read_text().splitlines() if not line.startswith("dt=")))

        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_malformed_value(self, tmp_path, state):
        """Test non-numeric metadata is rejected."""
        path = save_checkpoint(tmp_path / "final.okf", state, seed=1)
        meta = path.with_suffix(".meta")
        meta.write_text(meta.read_text().replace("gamma=4.0", "gamma=four"))

        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_mass_mismatch(self, tmp_path, state):
        """Test a sidecar m that disagrees with the dump is rejected."""
        path = save_checkpoint(tmp_path / "final.okf", state, seed=1)
        meta = path.with_suffix(".meta")
        meta.write_text(meta.read_text().replace("m=0.2", "m=0.25"))

        with pytest.raises(CheckpointError):
            load_checkpoint(path)
