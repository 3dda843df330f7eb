"""Simulation and training of soft quantum neural networks."""

__version__ = "0.1.0"
