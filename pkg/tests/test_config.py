"""Tests for settings, log formatting and the parallel helpers."""

import logging

import numpy as np
import orjson
import pytest

from linesearch.config import Settings, settings
from linesearch.core.exceptions import ConfigurationError
from linesearch.core.logging import ServiceFormatter
from linesearch.core.parallel import block_rng, ordered_map, resolve_jobs

from .base_test import BaseTest


def _square(x):
    return x * x


class TestSettings(BaseTest):
    """Tests for environment-driven settings."""

    def test_defaults(self):
        """Test the default numerical budget."""
        config = Settings()
        assert config.expectation_tol == 1e-10
        assert config.coarse_grid == 128
        assert config.jobs == 1

    def test_env_prefix(self, monkeypatch):
        """Test LINESEARCH_ variables override defaults."""
        monkeypatch.setenv("LINESEARCH_MAX_ROUNDS", "250")
        monkeypatch.setenv("LINESEARCH_LOG_JSON", "false")
        config = Settings()
        assert config.max_rounds == 250
        assert config.log_json is False


class TestLogFormatter(BaseTest):
    """Tests for the JSON log formatter."""

    def test_service_fields(self):
        """Test records carry the message, extra context and service stamp."""
        record = logging.LogRecord("linesearch.services.oracle", logging.INFO, __file__, 1, "Checks finished", None, None)
        record.failed = 0
        payload = orjson.loads(ServiceFormatter("%(name)s %(levelname)s %(message)s").format(record))
        assert payload["message"] == "Checks finished"
        assert payload["failed"] == 0
        assert payload["service"] == settings.app_name
        assert payload["version"] == settings.app_version


class TestParallel(BaseTest):
    """Tests for resolve_jobs, ordered_map and block_rng."""

    def test_resolve_explicit(self, monkeypatch):
        """Test an explicit value beats the environment."""
        monkeypatch.setenv("LINESEARCH_JOBS", "4")
        assert resolve_jobs(2) == 2

    def test_resolve_from_env(self, monkeypatch):
        """Test LINESEARCH_JOBS is the fallback."""
        monkeypatch.setenv("LINESEARCH_JOBS", "3")
        assert resolve_jobs() == 3

    def test_resolve_rejects_bad_values(self, monkeypatch):
        """Test non-integer and non-positive worker counts."""
        monkeypatch.setenv("LINESEARCH_JOBS", "many")
        with pytest.raises(ConfigurationError):
            resolve_jobs()
        with pytest.raises(ConfigurationError):
            resolve_jobs(0)

    def test_ordered_map_keeps_order(self):
        """Test results come back in submission order for one and two workers."""
        arguments = [(x,) for x in range(10)]
        assert ordered_map(_square, arguments, 1) == [x * x for x in range(10)]
        assert ordered_map(_square, arguments, 2) == [x * x for x in range(10)]

    def test_block_rng_streams(self):
        """Test streams depend on (seed, block) only."""
        first = block_rng(7, 0).random(5)
        assert np.array_equal(first, block_rng(7, 0).random(5))
        assert not np.array_equal(first, block_rng(7, 1).random(5))
        assert not np.array_equal(first, block_rng(8, 0).random(5))
