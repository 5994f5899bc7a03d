"""Procedural generation of multi-level underground tunnel worlds."""

from .config import PRESETS, EnvironmentSpec, resolve, resolve_preset
from .grid import Cell, GridDims, OccupancyGrid, TopometricType, classify_cell, count_units
from .pathgen import RouteDescriptor, generate_level, generate_world, shortest_path
from .pipeline import batch, build_world, generate
from .structural import LevelRequest, Unit, distribute

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "Cell",
    "EnvironmentSpec",
    "GridDims",
    "LevelRequest",
    "OccupancyGrid",
    "RouteDescriptor",
    "TopometricType",
    "Unit",
    "batch",
    "build_world",
    "classify_cell",
    "count_units",
    "distribute",
    "generate",
    "generate_level",
    "generate_world",
    "resolve",
    "resolve_preset",
    "shortest_path",
]
