"""Simulation and analysis of longest-chain consensus under random delays."""

__version__ = "0.1.0"
