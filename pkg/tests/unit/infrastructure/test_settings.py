"""
Unit tests for settings precedence.
"""

from pathlib import Path

import pytest

from infrastructure.error_handling.exceptions import InvalidParameterError
from infrastructure.settings import load_settings, read_key_value_file


@pytest.fixture(autouse=True)
def clean_environment(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("OKPHASE_JOBS", "OKPHASE_GRID_N", "OKPHASE_LOG_LEVEL", "OKPHASE_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)


@pytest.mark.unit
class TestLoadSettings:
    """Tests for load_settings."""

    def test_defaults(self):
        """Test built-in defaults."""
        settings = load_settings()

        assert settings.jobs == 1
        assert settings.grid_n == 128
        assert settings.log_level == "INFO"
        assert settings.output_dir == Path("okphase_out")

    def test_environment(self, monkeypatch):
        """Test OKPHASE_* variables override defaults."""
        monkeypatch.setenv("OKPHASE_JOBS", "4")

        assert load_settings().jobs == 4

    def test_config_file_over_environment(self, tmp_path, monkeypatch):
        """Test the master config file beats the environment."""
        monkeypatch.setenv("OKPHASE_JOBS", "4")
        config = tmp_path / "okphase.conf"
        config.write_text("jobs=2\ngrid_n=64\nt1=10\n")

        settings = load_settings(config, passthrough=("t1",))

        assert settings.jobs == 2
        assert settings.grid_n == 64

    def test_overrides_win(self, tmp_path):
        """Test explicit overrides beat the config file; None is ignored."""
        config = tmp_path / "okphase.conf"
        config.write_text("log_level=debug\n")

        settings = load_settings(config, log_level="warning", log_dir=None)

        assert settings.log_level == "WARNING"
        assert settings.log_dir is None

    def test_invalid_value(self):
        """Test validation errors become InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            load_settings(grid_n=63)

    def test_missing_config(self, tmp_path):
        """Test a missing config file is rejected."""
        with pytest.raises(InvalidParameterError):
            read_key_value_file(tmp_path / "absent.conf")
