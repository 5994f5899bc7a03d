"""Turning occupancy grids into tiled, meshed simulator worlds."""

from .catalog import TileCatalog, builtin_catalog, load_catalog
from .mesh import Mesh, concatenate, dumps_obj, inverse_transform, loads_obj, rotate_z, transform
from .sdf import emit_world
from .tiles import SHAFT, TileAsset, builtin_rock, builtin_tiles
from .world import (
    Obstacle,
    TilePlacement,
    WorldManifest,
    associate,
    dumps_manifest,
    loads_manifest,
    merge_meshes,
    place_obstacles,
    scale_world,
)

__all__ = [
    "Mesh",
    "Obstacle",
    "SHAFT",
    "TileAsset",
    "TileCatalog",
    "TilePlacement",
    "WorldManifest",
    "associate",
    "builtin_catalog",
    "builtin_rock",
    "builtin_tiles",
    "concatenate",
    "dumps_manifest",
    "dumps_obj",
    "emit_world",
    "inverse_transform",
    "load_catalog",
    "loads_manifest",
    "loads_obj",
    "merge_meshes",
    "place_obstacles",
    "rotate_z",
    "scale_world",
    "transform",
]
