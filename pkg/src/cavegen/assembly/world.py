"""
Occupancy grid -> world manifest -> merged mesh.

Association walks the occupied cells depth-first from a start cell, giving
each one a randomly chosen asset of its topometric type rotated to match its
neighbour mask. Cells the walk never reaches (other components) seed new walks
in (level, y, x) order, so every occupied cell ends up with exactly one tile.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import AssetMissing, GridError, ParseError
from ..grid import CARDINALS, Cell, GridDims, OccupancyGrid, TopometricType, classify_cell, step
from .catalog import TileCatalog
from .mesh import Mesh, concatenate, transform
from .tiles import SHAFT

MANIFEST_VERSION = 1
OBSTACLE_KINDS = (TopometricType.PATHWAY.value, TopometricType.CORNER.value)
OBSTACLE_MARGIN = 0.25  # fraction of the tile edge kept clear of the walls


@dataclass
class TilePlacement:
    level: int
    cell: Cell
    kind: str
    rotation: int
    asset_id: str
    translation: tuple[float, float, float]
    scale: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def sort_key(self):
        return (self.level, self.cell.y, self.cell.x, self.kind == SHAFT)


@dataclass
class Obstacle:
    position: tuple[float, float, float]
    asset_id: str
    scale: float = 1.0


@dataclass
class WorldManifest:
    dims: GridDims
    seed: int | None
    preset: str
    tile_size: float
    level_height: float
    tunnel_width: float
    placements: list[TilePlacement] = field(default_factory=list)
    obstacles: list[Obstacle] = field(default_factory=list)
    shafts: list[tuple[int, Cell]] = field(default_factory=list)
    global_scale: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def to_dict(self) -> dict:
        return {
            "format_version": MANIFEST_VERSION,
            "dims": {"l": self.dims.levels, "m": self.dims.rows, "n": self.dims.cols},
            "seed": self.seed,
            "preset": self.preset,
            "tile_size": self.tile_size,
            "level_height": self.level_height,
            "tunnel_width": self.tunnel_width,
            "global_scale": list(self.global_scale),
            "shafts": [{"level": k, "x": c.x, "y": c.y} for k, c in self.shafts],
            "placements": [
                {
                    "level": p.level,
                    "x": p.cell.x,
                    "y": p.cell.y,
                    "type": p.kind,
                    "rotation": p.rotation,
                    "asset": p.asset_id,
                    "translation": list(p.translation),
                    "scale": list(p.scale),
                }
                for p in self.placements
            ],
            "obstacles": [
                {"position": [round(v, 6) for v in o.position], "asset": o.asset_id, "scale": round(o.scale, 6)}
                for o in self.obstacles
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WorldManifest":
        try:
            dims = GridDims(d["dims"]["l"], d["dims"]["m"], d["dims"]["n"])
            return cls(
                dims=dims,
                seed=d.get("seed"),
                preset=d.get("preset", "custom"),
                tile_size=float(d["tile_size"]),
                level_height=float(d["level_height"]),
                tunnel_width=float(d["tunnel_width"]),
                placements=[
                    TilePlacement(
                        p["level"], Cell(p["x"], p["y"]), p["type"], p["rotation"], p["asset"],
                        tuple(float(v) for v in p["translation"]), tuple(float(v) for v in p["scale"]),
                    )
                    for p in d["placements"]
                ],
                obstacles=[Obstacle(tuple(o["position"]), o["asset"], float(o["scale"])) for o in d.get("obstacles", [])],
                shafts=[(s["level"], Cell(s["x"], s["y"])) for s in d.get("shafts", [])],
                global_scale=tuple(float(v) for v in d.get("global_scale", (1, 1, 1))),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed manifest: {exc!r}") from None


def dumps_manifest(manifest: WorldManifest) -> str:
    return json.dumps(manifest.to_dict(), indent=1, sort_keys=False) + "\n"


def loads_manifest(text: str) -> WorldManifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    return WorldManifest.from_dict(data)


def _pick(group, rng: np.random.Generator):
    return group[int(rng.integers(0, len(group)))] if len(group) > 1 else group[0]


def associate(
    grid: OccupancyGrid,
    catalog: TileCatalog,
    rng: np.random.Generator,
    start: tuple[int, Cell] | None = None,
    preset: str = "custom",
) -> WorldManifest:
    """Tile every occupied cell and every shaft; placements sorted by (level, y, x).

    ``start`` is ``(level, cell)`` for the first walk; by default the first
    occupied cell in sweep order. Raises IsolatedCellError for occupied cells
    without neighbours.
    """
    T, H = catalog.tile_size, catalog.level_height
    placed: dict[tuple[int, Cell], TilePlacement] = {}

    def place(level: int, p: Cell) -> None:
        topo, rot = classify_cell(grid, level, p)
        asset = _pick(catalog.group(topo.value), rng)
        placed[(level, p)] = TilePlacement(level, p, topo.value, rot, asset.id, (p.x * T, p.y * T, level * H))

    def walk(level: int, origin: Cell) -> None:
        # explicit stack of (cell, direction we arrived from); neighbours are
        # pushed in reverse so they pop in up, down, left, right order
        stack = [(origin, None)]
        while stack:
            p, back = stack.pop()
            if (level, p) in placed:
                continue
            place(level, p)
            for d in reversed(CARDINALS):
                if d == back:
                    continue
                q = step(p, d)
                if grid.occupied(level, q) and (level, q) not in placed:
                    stack.append((q, (-d[0], -d[1])))

    if start is not None:
        level, cell = start
        if not grid.occupied(level, Cell(*cell)):
            raise GridError(f"start cell {tuple(cell)} on level {level} is not occupied")
        walk(level, Cell(*cell))
    for level in range(grid.dims.levels):
        for p in grid.occupied_cells(level):
            if (level, p) not in placed:
                walk(level, p)

    placements = list(placed.values())
    for level, p in grid.shafts:
        asset = _pick(catalog.group(SHAFT), rng)
        placements.append(TilePlacement(level, p, SHAFT, 0, asset.id, (p.x * T, p.y * T, level * H)))
    placements.sort(key=TilePlacement.sort_key)
    return WorldManifest(
        dims=grid.dims,
        seed=grid.seed,
        preset=preset,
        tile_size=T,
        level_height=H,
        tunnel_width=catalog.tunnel_width,
        placements=placements,
        shafts=list(grid.shafts),
    )


def place_obstacles(manifest: WorldManifest, density: float, rng: np.random.Generator, catalog: TileCatalog | None = None) -> WorldManifest:
    """Poisson(density) rocks per pathway and corner tile, kept off the walls."""
    if density < 0:
        raise ValueError(f"density must be >= 0, got {density}")
    ids = [a.id for a in catalog.obstacles] if catalog is not None and catalog.obstacles else ["builtin-rock"]
    half = (0.5 - OBSTACLE_MARGIN) * manifest.tile_size
    out: list[Obstacle] = []
    if density > 0:
        for p in manifest.placements:
            if p.kind not in OBSTACLE_KINDS:
                continue
            for _ in range(int(rng.poisson(density))):
                aid = _pick(ids, rng)
                dx, dy = rng.uniform(-half, half, size=2)
                scale = float(rng.uniform(0.75, 1.25))
                x, y, z = p.translation
                out.append(Obstacle((float(x + dx), float(y + dy), float(z)), aid, scale))
    manifest.obstacles = out
    return manifest


def world_length(manifest: WorldManifest) -> float:
    """Extent along y of the placed tiles, in metres before global scaling."""
    ys = [p.cell.y for p in manifest.placements]
    return (max(ys) - min(ys) + 1) * manifest.tile_size


def scale_world(manifest: WorldManifest, min_length: float, max_width: float) -> WorldManifest:
    """Set ``global_scale``: x and z stretch tunnels to ``max_width``, y only grows to reach ``min_length``."""
    if min_length <= 0 or max_width <= 0:
        raise ValueError("scaling targets must be positive")
    if not manifest.placements:
        raise GridError("cannot scale an empty manifest")
    sw = max_width / manifest.tunnel_width
    length = world_length(manifest)
    sl = min_length / length if length < min_length else 1.0
    manifest.global_scale = (sw, sl, sw)
    return manifest


def _asset_mesh(catalog: TileCatalog, asset_id: str) -> Mesh:
    asset = catalog.get(asset_id)
    if asset.mesh is None:
        raise AssetMissing(f"asset {asset_id!r} has no mesh loaded")
    return asset.mesh


def placement_mesh(p: TilePlacement, catalog: TileCatalog, global_scale=(1.0, 1.0, 1.0)) -> Mesh:
    m = _asset_mesh(catalog, p.asset_id)
    scale = np.asarray(p.scale) * np.asarray(global_scale)
    return Mesh(transform(m.vertices, p.rotation, p.translation, scale), m.faces)


def obstacle_mesh(o: Obstacle, catalog: TileCatalog, global_scale=(1.0, 1.0, 1.0)) -> Mesh:
    m = _asset_mesh(catalog, o.asset_id)
    verts = (m.vertices * o.scale + np.asarray(o.position)) * np.asarray(global_scale)
    return Mesh(verts, m.faces)


def merge_meshes(manifest: WorldManifest, catalog: TileCatalog, include_obstacles: bool = False) -> Mesh:
    """One mesh for the whole world, tiles in manifest order; global scale applied last."""
    parts = [placement_mesh(p, catalog, manifest.global_scale) for p in manifest.placements]
    if include_obstacles:
        parts += [obstacle_mesh(o, catalog, manifest.global_scale) for o in manifest.obstacles]
    return concatenate(parts)
