"""Transaction-pool topology measurement simulator."""

__version__ = "0.1.0"
