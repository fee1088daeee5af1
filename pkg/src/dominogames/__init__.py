"""Solver workbench for two-player Domino games on Z^d."""

__version__ = "0.1.0"
