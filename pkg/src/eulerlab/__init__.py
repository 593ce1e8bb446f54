"""Numerical workbench for one convex-integration step of 3D Euler on the unit torus."""

from .grid import GridSpec

__all__ = ["GridSpec"]
__version__ = "0.1.0"
