"""
Prometheus Metrics HTTP Server
Exposes /metrics for scraping during long sweeps
"""
from prometheus_client import start_http_server

from infrastructure.logging_config import get_logger

logger = get_logger(__name__)


def start_metrics_server(port: int, host: str = "127.0.0.1") -> None:
    """
    Start the Prometheus metrics HTTP server in a daemon thread.

    Args:
        port: Port to bind to
        host: Host to bind to
    """
    start_http_server(port, addr=host)
    logger.info(f"Prometheus metrics server started on http://{host}:{port}/metrics")
