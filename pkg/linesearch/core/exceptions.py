"""Custom exceptions and error handling."""

from typing import Any, Dict, Optional

from linesearch.core.logging import get_logger

logger = get_logger(__name__)


class LineSearchError(Exception):
    """Base exception for linesearch."""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a machine-readable error payload."""
        response: Dict[str, Any] = {"error": self.message, "error_code": self.error_code or "UNKNOWN_ERROR"}
        if self.details:
            response["details"] = self.details
        return response


class InvalidProbability(LineSearchError):
    """Raised when a detection probability lies outside [0, 1]."""

    def __init__(self, p: float):
        super().__init__(
            message=f"Detection probability must lie in [0, 1], got {p}",
            error_code="INVALID_PROBABILITY",
            details={"p": p},
        )


class InvalidSpeed(LineSearchError):
    """Raised when the slow speed lies outside [0, 1]."""

    def __init__(self, v: float):
        super().__init__(
            message=f"Slow speed must lie in [0, 1], got {v}",
            error_code="INVALID_SPEED",
            details={"v": v},
        )


class UnsolvableInstance(LineSearchError):
    """Raised for p = 0 and v = 0, where no strategy ever finds the target."""

    def __init__(self, p: float = 0.0, v: float = 0.0):
        super().__init__(
            message="No strategy can find the target when p = 0 and v = 0",
            error_code="UNSOLVABLE_INSTANCE",
            details={"p": p, "v": v},
        )


class DivergentFastRatio(LineSearchError):
    """Raised when a fast-only expansion ratio makes the expected time diverge."""

    def __init__(self, p: float, a: Optional[float] = None):
        limit = 1.0 / (1.0 - p) if p < 1 else float("inf")
        if a is None:
            message = f"No convergent fast-only expansion ratio exists for p = {p}"
        else:
            message = f"Fast expansion ratio {a} must be below 1/(1-p) = {limit}"
        super().__init__(
            message=message,
            error_code="DIVERGENT_FAST_RATIO",
            details={"p": p, "a": a, "limit": limit},
        )


class RatioNotAboveOne(LineSearchError):
    """Raised when an expansion ratio is not strictly greater than one."""

    def __init__(self, a: float):
        super().__init__(
            message=f"Expansion ratio must be > 1, got {a}",
            error_code="RATIO_NOT_ABOVE_ONE",
            details={"a": a},
        )


class InvalidScoutRatio(LineSearchError):
    """Raised when a scout-ahead ratio is outside [0, 1] or set on a non-hybrid strategy."""

    def __init__(self, b: float, reason: str = "must lie in [0, 1]"):
        super().__init__(
            message=f"Scout-ahead ratio {b} {reason}",
            error_code="INVALID_SCOUT_RATIO",
            details={"b": b, "reason": reason},
        )


class SlowSpeedZero(LineSearchError):
    """Raised when an operation needs the slow speed but v = 0."""

    def __init__(self, operation: str):
        super().__init__(
            message=f"{operation} requires a positive slow speed",
            error_code="SLOW_SPEED_ZERO",
            details={"operation": operation},
        )


class InvalidTarget(LineSearchError):
    """Raised for a target position the oracle cannot evaluate."""

    def __init__(self, d: float, reason: str):
        super().__init__(
            message=f"Invalid target position {d}: {reason}",
            error_code="INVALID_TARGET",
            details={"d": d, "reason": reason},
        )


class NeverPassed(LineSearchError):
    """Raised when a trajectory never reaches the target within the round budget."""

    def __init__(self, d: float, rounds: int):
        super().__init__(
            message=f"Target {d} was not passed within {rounds} rounds",
            error_code="NEVER_PASSED",
            details={"d": d, "rounds": rounds},
        )


class UncertifiedExpectation(LineSearchError):
    """Raised when the round limit is reached before the omitted tail is certified."""

    def __init__(self, d: float, rounds: int, tail_bound: float):
        super().__init__(
            message=f"Expectation at target {d} could not be certified within {rounds} rounds (tail bound {tail_bound})",
            error_code="UNCERTIFIED_EXPECTATION",
            details={"d": d, "rounds": rounds, "tail_bound": tail_bound},
        )


class PassTimeOverflow(LineSearchError):
    """Raised when the passes a computation needs lie beyond floating-point range."""

    def __init__(self, d: float, passes: int, rounds: int):
        super().__init__(
            message=f"Target {d} needs {passes} passes but pass times overflow after round {rounds}",
            error_code="PASS_TIME_OVERFLOW",
            details={"d": d, "passes": passes, "rounds": rounds},
        )


class DivergentSeries(LineSearchError):
    """Raised when the expected detection time is infinite."""

    def __init__(self, growth: float, p: float):
        super().__init__(
            message=f"Expected detection time diverges: growth {growth} times miss probability {1.0 - p} is >= 1",
            error_code="DIVERGENT_SERIES",
            details={"growth": growth, "p": p},
        )


class NoDetection(LineSearchError):
    """Raised when the target can never be detected (p = 0 and no slow pass)."""

    def __init__(self, d: float):
        super().__init__(
            message=f"Target {d} is never detected: no slow pass and p = 0",
            error_code="NO_DETECTION",
            details={"d": d},
        )


class InvalidBeta(LineSearchError):
    """Raised when an exploration rate violates beta * v > 1."""

    def __init__(self, v: float, beta: float):
        super().__init__(
            message=f"Exploration rate must satisfy beta * v > 1, got beta = {beta}, v = {v}",
            error_code="INVALID_BETA",
            details={"v": v, "beta": beta},
        )


class InvalidGrid(LineSearchError):
    """Raised for malformed heatmap grid requests."""

    def __init__(self, field: str, reason: str):
        super().__init__(
            message=f"Invalid grid {field}: {reason}",
            error_code="INVALID_GRID",
            details={"field": field, "reason": reason},
        )


class ConfigurationError(LineSearchError):
    """Raised when command-line options are inconsistent."""

    def __init__(self, field: str, reason: str):
        super().__init__(
            message=f"Invalid option {field}: {reason}",
            error_code="CONFIGURATION_ERROR",
            details={"field": field, "reason": reason},
        )


class OutputError(LineSearchError):
    """Raised when results cannot be written or read back."""

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Output error for {path}: {reason}",
            error_code="OUTPUT_ERROR",
            details={"path": path, "reason": reason},
        )


# Exit status per error code; anything unlisted is a validation failure
EXIT_CODES = {
    "NEVER_PASSED": 4,
    "DIVERGENT_SERIES": 4,
    "NO_DETECTION": 4,
    "UNCERTIFIED_EXPECTATION": 4,
    "PASS_TIME_OVERFLOW": 4,
    "OUTPUT_ERROR": 3,
}


def exit_code_for(exc: LineSearchError) -> int:
    """Map a linesearch exception to a process exit status."""
    return EXIT_CODES.get(exc.error_code or "", 2)


def handle_linesearch_exception(exc: LineSearchError) -> Dict[str, Any]:
    """Log a linesearch exception and return its error payload."""
    logger.error(
        f"linesearch error: {exc.message}",
        extra={"error_code": exc.error_code, "details": exc.details},
    )
    return exc.to_dict()


def handle_generic_exception(exc: Exception) -> Dict[str, Any]:
    """Log an unexpected exception and return a generic error payload."""
    logger.error(
        f"Unexpected error: {str(exc)}",
        extra={"exception_type": type(exc).__name__},
        exc_info=True,
    )
    return {"error": "Internal error", "error_code": "INTERNAL_ERROR", "details": {"exception_type": type(exc).__name__}}
