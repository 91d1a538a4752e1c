"""Linear search with probabilistic detection at two speeds."""

__version__ = "1.0.0"
