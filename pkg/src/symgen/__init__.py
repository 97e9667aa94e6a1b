"""Synthetic task-data generation with execution-based agreement verification."""

__version__ = "0.1.0"
