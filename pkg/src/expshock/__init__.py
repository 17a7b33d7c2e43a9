"""Simulation and validation toolkit for the formation of a free phase
boundary (an expansion shock) in a spherically symmetric two-phase
relativistic fluid."""

__version__ = "0.1.0"
