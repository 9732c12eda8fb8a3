"""Quaternion-based hover control and simulation for insect-scale flapping-wing robots."""

__version__ = "0.1.0"
