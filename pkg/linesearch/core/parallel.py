"""Deterministic parallel map and seeded random streams."""

import os
from typing import Any, Callable, Iterable, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from linesearch.config import settings
from linesearch.core.exceptions import ConfigurationError


def resolve_jobs(jobs: Optional[int] = None) -> int:
    """Worker count: explicit value, then LINESEARCH_JOBS, then settings."""
    if jobs is None:
        env_value = os.getenv("LINESEARCH_JOBS")
        if env_value:
            try:
                jobs = int(env_value)
            except ValueError as exc:
                raise ConfigurationError("LINESEARCH_JOBS", f"not an integer: {env_value!r}") from exc
        else:
            jobs = settings.jobs
    if jobs < 1:
        raise ConfigurationError("jobs", f"must be >= 1, got {jobs}")
    return jobs


def ordered_map(func: Callable[..., Any], arguments: Iterable[Sequence[Any]], jobs: int = 1) -> List[Any]:
    """Apply func to each argument tuple; results keep submission order for any worker count."""
    arguments = list(arguments)
    if jobs == 1 or len(arguments) < 2:
        return [func(*args) for args in arguments]
    return list(Parallel(n_jobs=jobs)(delayed(func)(*args) for args in arguments))


def block_rng(seed: int, block_index: int) -> np.random.Generator:
    """Independent generator for one block of trials, keyed on (seed, block)."""
    return np.random.default_rng(np.random.SeedSequence([seed, block_index]))
