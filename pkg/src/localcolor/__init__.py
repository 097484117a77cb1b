"""Distributed graph coloring in a simulated LOCAL model."""

__version__ = "0.1.0"
