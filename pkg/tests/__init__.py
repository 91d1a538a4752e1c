"""Tests for linesearch."""
