"""
Unit tests for plain and structured logging configuration.
"""

import json
import logging

import pytest

from app.services.dynamics import continuation
from app.services.pipeline import protocol, sweep_service
from infrastructure.error_handling import retry
from infrastructure.logging.structured_logger import STRUCTURED_ROOT, configure_structured_logging, get_structured_logger
from infrastructure.logging_config import setup_logging

SERVICE_MODULES = (protocol, sweep_service, continuation, retry)


@pytest.fixture(autouse=True)
def restore_logging():
    yield
    configure_structured_logging(None)
    setup_logging(logging.INFO)


def last_json_line(path):
    lines = [line for line in path.read_text().splitlines() if line.strip()]
    return json.loads(lines[-1])


@pytest.mark.unit
class TestSetupLogging:
    """Tests for setup_logging applied to service modules."""

    def test_level_suppresses_service_info(self, tmp_path):
        """Test an ERROR level silences INFO from the protocol module."""
        log_file = tmp_path / "okphase.log"
        setup_logging("ERROR", log_file)

        protocol.logger.info("phase boundary reached")
        protocol.structured_logger.info("phase boundary reached")

        assert log_file.read_text() == ""
        assert not protocol.logger.isEnabledFor(logging.INFO)
        assert not protocol.structured_logger.logger.isEnabledFor(logging.INFO)

    def test_errors_still_reach_log_file(self, tmp_path):
        """Test ERROR records from a service module land in the log file."""
        log_file = tmp_path / "okphase.log"
        setup_logging("ERROR", log_file)

        protocol.logger.error("run aborted")

        assert "run aborted" in log_file.read_text()

    @pytest.mark.parametrize("module", SERVICE_MODULES, ids=lambda m: m.__name__)
    def test_module_loggers_propagate(self, module, tmp_path):
        """Test service loggers keep propagating to the configured handlers."""
        log_file = tmp_path / "okphase.log"
        setup_logging("INFO", log_file)

        module.logger.info("configured handler reached")

        assert module.logger.propagate
        assert "configured handler reached" in log_file.read_text()

    def test_structured_logger_is_separate(self):
        """Test the structured logger does not reuse the module logger."""
        assert protocol.structured_logger.logger is not protocol.logger
        assert protocol.structured_logger.logger.name == f"{STRUCTURED_ROOT}.{protocol.__name__}"


@pytest.mark.unit
class TestStructuredLogging:
    """Tests for JSON output of the structured logger."""

    def test_json_line_fields(self, tmp_path):
        """Test level, timestamp and extra fields are populated."""
        setup_logging("INFO")
        path = configure_structured_logging(tmp_path / "logs")
        logger = get_structured_logger("okphase.test")

        logger.log_phase("t1", 40.0, 0.05, -0.12)

        record = last_json_line(path)
        assert record["level"] == "INFO"
        assert record["timestamp"]
        assert record["logger"] == f"{STRUCTURED_ROOT}.okphase.test"
        assert record["phase"] == "t1"
        assert record["t"] == 40.0

    def test_context_added_and_cleared(self, tmp_path):
        """Test context fields appear until cleared."""
        setup_logging("INFO")
        path = configure_structured_logging(tmp_path)
        logger = get_structured_logger("okphase.context")

        logger.set_context(gamma=3.0, seed=7)
        logger.info("with context")
        with_context = last_json_line(path)
        logger.clear_context()
        logger.info("without context")
        without_context = last_json_line(path)

        assert with_context["gamma"] == 3.0
        assert with_context["seed"] == 7
        assert "gamma" not in without_context

    def test_step_rejection_is_warning(self, tmp_path):
        """Test step rejections are logged at WARNING with the attempt."""
        setup_logging("INFO")
        path = configure_structured_logging(tmp_path)

        retry.structured_logger.log_step_rejection("etdrk4", 2, 0.025, "overflow")

        record = last_json_line(path)
        assert record["level"] == "WARNING"
        assert record["attempt"] == 2
        assert record["reason"] == "overflow"

    def test_no_file_without_log_dir(self, tmp_path):
        """Test no file handler remains when the log directory is unset."""
        configure_structured_logging(tmp_path)

        assert configure_structured_logging(None) is None
        root = logging.getLogger(STRUCTURED_ROOT)
        assert not any(isinstance(h, logging.FileHandler) for h in root.handlers)
