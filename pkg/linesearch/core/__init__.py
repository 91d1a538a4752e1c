"""Core utilities: logging, exceptions, deterministic parallelism."""

from .exceptions import (
    ConfigurationError,
    DivergentFastRatio,
    DivergentSeries,
    InvalidBeta,
    InvalidGrid,
    InvalidProbability,
    InvalidScoutRatio,
    InvalidSpeed,
    InvalidTarget,
    LineSearchError,
    NeverPassed,
    NoDetection,
    OutputError,
    PassTimeOverflow,
    RatioNotAboveOne,
    SlowSpeedZero,
    UncertifiedExpectation,
    UnsolvableInstance,
    exit_code_for,
    handle_generic_exception,
    handle_linesearch_exception,
)
from .logging import get_logger, setup_logging
from .parallel import ordered_map, resolve_jobs

__all__ = [
    "setup_logging",
    "get_logger",
    "ordered_map",
    "resolve_jobs",
    "LineSearchError",
    "InvalidProbability",
    "InvalidSpeed",
    "UnsolvableInstance",
    "DivergentFastRatio",
    "RatioNotAboveOne",
    "InvalidScoutRatio",
    "SlowSpeedZero",
    "InvalidTarget",
    "NeverPassed",
    "DivergentSeries",
    "NoDetection",
    "UncertifiedExpectation",
    "PassTimeOverflow",
    "InvalidBeta",
    "InvalidGrid",
    "ConfigurationError",
    "OutputError",
    "exit_code_for",
    "handle_linesearch_exception",
    "handle_generic_exception",
]
