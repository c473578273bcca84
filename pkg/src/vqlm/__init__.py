"""Quasi-local energy of unit spheres near null infinity of Vaidya spacetimes.

The library builds the exact geometry of unit coordinate spheres at distance
``d`` along an outgoing null direction, extracts their ``1/d`` expansion
coefficients, solves the leading-order optimal embedding equation, and
compares the resulting energy with its closed form.
"""

from .massaspect import MassAspectProfile, parse_profile, preset
from .s2grid import build_grid
from .vaidyageom import surface_geometry

__version__ = "0.1.0"

__all__ = ["MassAspectProfile", "parse_profile", "preset", "build_grid", "surface_geometry"]
