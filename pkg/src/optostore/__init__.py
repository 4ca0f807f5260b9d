"""Simulation of optomechanical light storage in a driven cavity."""

__version__ = "0.1.0"
