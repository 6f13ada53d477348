"""
Autocrat - Logging Configuration

Structured logging setup using structlog. Log lines go to stderr so that
command output on stdout stays machine-readable.
"""

import logging
import sys
from typing import Any, Optional

import structlog

from autocrat.core.config import settings


def setup_logging() -> None:
    """Configure structured logging for the application."""

    # Configure standard library logging
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, settings.LOG_LEVEL.upper()),
    )

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            # JSON for machines, console for people
            structlog.processors.JSONRenderer() if settings.LOG_FORMAT == "json"
            else structlog.dev.ConsoleRenderer(),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def log_solve_event(
    logger,
    status: str,
    outer_rounds: int,
    iterations: int,
    pruned: int,
    elapsed_ms: float,
    **kwargs: Any
) -> None:
    """
    Log the outcome of a full solve with a consistent shape.

    Args:
        logger: Logger instance
        status: Final solve status
        outer_rounds: Number of iterate/prune rounds
        iterations: Total Jacobi sweeps over all rounds
        pruned: Number of autocrat actions removed
        elapsed_ms: Wall time in milliseconds
        **kwargs: Additional context data
    """
    logger.info(
        "solve_completed",
        status=status,
        outer_rounds=outer_rounds,
        iterations=iterations,
        pruned=pruned,
        elapsed_ms=elapsed_ms,
        **kwargs
    )


def log_verification_event(
    logger,
    target: float,
    policy: str,
    passed: bool,
    details: Optional[dict] = None,
    **kwargs: Any
) -> None:
    """
    Log one verdict row. Failures are logged as warnings.

    Args:
        logger: Logger instance
        target: Enforced target value
        policy: Opponent policy name
        passed: Verdict
        details: Additional verdict details
        **kwargs: Additional context data
    """
    log = logger.info if passed else logger.warning
    log(
        "verification_verdict",
        target=target,
        policy=policy,
        passed=passed,
        details=details or {},
        **kwargs
    )


def log_performance_metric(
    logger,
    metric_name: str,
    value: float,
    unit: Optional[str] = None,
    **kwargs: Any
) -> None:
    """
    Log performance metrics with consistent format.

    Args:
        logger: Logger instance
        metric_name: Name of the metric
        value: Metric value
        unit: Unit of measurement
        **kwargs: Additional context data
    """
    logger.info(
        "performance_metric",
        metric_name=metric_name,
        value=value,
        unit=unit,
        **kwargs
    )
