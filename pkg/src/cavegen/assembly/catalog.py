"""
Tile catalogs.

A catalog document is JSON::

    {
      "tunnel_width": 4.0,            # optional, used for builtin fallback
      "tunnel_height": 4.0,
      "assets": [
        {"id": "straight-a", "type": "pathway",
         "mesh": "meshes/straight_a.obj"       # or {"builtin": "pathway"}
         "nominal_size": [8, 8, 4],
         "port_edges": ["left", "right"],
         "textures": {"cave_wall": "tex/wall.png"}},
        ...
      ],
      "obstacles": [ {"id": "rock-1", "mesh": ..., "nominal_size": [...]} ]
    }

Relative mesh paths resolve against the catalog file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import AssetMissing, CatalogIncomplete, ParseError
from .mesh import Mesh, loads_obj
from .tiles import (
    DEFAULT_TUNNEL_HEIGHT,
    DEFAULT_TUNNEL_WIDTH,
    SHAFT,
    TEXTURE_SLOTS,
    TILE_KINDS,
    TileAsset,
    builtin_rock,
    builtin_tiles,
    canonical_port_names,
    rock_mesh,
    shaft_mesh,
    tunnel_tile_mesh,
)

_SIZE_TOL = 1e-9


@dataclass
class TileCatalog:
    groups: dict[str, list[TileAsset]]
    obstacles: list[TileAsset] = field(default_factory=list)
    tunnel_width: float = DEFAULT_TUNNEL_WIDTH

    def __post_init__(self):
        self._by_id = {a.id: a for a in self.assets()}

    def assets(self) -> list[TileAsset]:
        return [a for kind in TILE_KINDS for a in self.groups.get(kind, [])] + list(self.obstacles)

    def group(self, kind: str) -> list[TileAsset]:
        return self.groups.get(kind, [])

    def get(self, asset_id: str) -> TileAsset:
        try:
            return self._by_id[asset_id]
        except KeyError:
            raise AssetMissing(f"asset {asset_id!r} is not in the catalog") from None

    @property
    def tile_size(self) -> float:
        return next(iter(self.assets())).footprint

    @property
    def level_height(self) -> float:
        return self.groups[SHAFT][0].nominal_size[2]

    def to_dict(self) -> dict:
        return {
            "tunnel_width": self.tunnel_width,
            "assets": [a.to_dict() for kind in TILE_KINDS for a in self.groups.get(kind, [])],
            "obstacles": [a.to_dict() for a in self.obstacles],
        }


def builtin_catalog(tunnel_width: float = DEFAULT_TUNNEL_WIDTH, tunnel_height: float = DEFAULT_TUNNEL_HEIGHT) -> TileCatalog:
    groups: dict[str, list[TileAsset]] = {}
    for a in builtin_tiles(tunnel_width, tunnel_height):
        groups.setdefault(a.kind, []).append(a)
    return TileCatalog(groups, [builtin_rock(tunnel_width)], tunnel_width)


def _builtin_mesh(name: str, size, tunnel_width: float, where: str) -> Mesh:
    w, _, h = size
    if name == SHAFT:
        return shaft_mesh(tunnel_width, h)
    if name == "rock":
        return rock_mesh(w / 2.0)
    if name in TILE_KINDS:
        return tunnel_tile_mesh(canonical_port_names(name), w, tunnel_width, h)
    raise ParseError(f"unknown builtin mesh {name!r}", where)


def _parse_asset(raw, where: str, base: Path | None, tunnel_width: float, obstacle: bool) -> TileAsset:
    if not isinstance(raw, dict):
        raise ParseError("asset entry must be an object", where)
    for key in ("id", "mesh", "nominal_size") + (() if obstacle else ("type",)):
        if key not in raw:
            raise ParseError(f"missing field {key!r}", where)
    aid = raw["id"]
    if not isinstance(aid, str) or not aid:
        raise ParseError("id must be a non-empty string", f"{where}.id")
    kind = "obstacle" if obstacle else raw["type"]
    if not obstacle and kind not in TILE_KINDS:
        raise ParseError(f"unknown type {kind!r}; expected one of {list(TILE_KINDS)}", f"{where}.type")
    size = raw["nominal_size"]
    if not (isinstance(size, list) and len(size) == 3 and all(isinstance(v, (int, float)) and v > 0 for v in size)):
        raise ParseError("nominal_size must be three positive numbers", f"{where}.nominal_size")
    size = tuple(float(v) for v in size)
    if not obstacle and abs(size[0] - size[1]) > _SIZE_TOL:
        raise ParseError(f"footprint must be square, got {size[0]} x {size[1]}", f"{where}.nominal_size")

    expected = canonical_port_names(kind) if not obstacle else frozenset()
    ports = raw.get("port_edges", sorted(expected))
    if not isinstance(ports, list) or not all(isinstance(p, str) for p in ports):
        raise ParseError("port_edges must be a list of direction names", f"{where}.port_edges")
    if frozenset(ports) != expected:
        raise ParseError(
            f"port_edges {sorted(ports)} do not match the canonical ports of {kind} {sorted(expected)}",
            f"{where}.port_edges",
        )

    textures = raw.get("textures", {})
    if not isinstance(textures, dict) or any(k not in TEXTURE_SLOTS for k in textures):
        raise ParseError(f"textures keys must be among {list(TEXTURE_SLOTS)}", f"{where}.textures")

    src = raw["mesh"]
    if isinstance(src, dict) and "builtin" in src:
        mesh = _builtin_mesh(src["builtin"], size, float(raw.get("tunnel_width", tunnel_width)), f"{where}.mesh")
    elif isinstance(src, str):
        path = Path(src)
        if not path.is_absolute() and base is not None:
            path = base / path
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read mesh file {src!r}: {exc.strerror}", f"{where}.mesh") from None
        mesh = loads_obj(text, str(src))
    else:
        raise ParseError("mesh must be a file path or {\"builtin\": name}", f"{where}.mesh")
    return TileAsset(
        id=aid,
        kind=kind,
        mesh_source=src,
        nominal_size=size,
        port_edges=expected,
        texture_slots={str(k): str(v) for k, v in textures.items()},
        tunnel_width=raw.get("tunnel_width"),
        mesh=mesh,
    )


def load_catalog(document=None, fallback: bool = False) -> TileCatalog:
    """Parse and validate a catalog.

    ``document`` is a JSON string, an already-parsed dict, a path, or None
    (treated as empty). With ``fallback`` any missing group is filled with the
    builtin primitive for that type; otherwise a missing group raises
    CatalogIncomplete.
    """
    base = None
    if isinstance(document, Path) or (isinstance(document, str) and document.strip()[:1] not in ("{", "")):
        path = Path(document)
        base = path.parent
        try:
            document = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read catalog {str(path)!r}: {exc.strerror}") from None
    if document is None or (isinstance(document, str) and not document.strip()):
        data: dict = {}
    elif isinstance(document, str):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None
    else:
        data = document
    if not isinstance(data, dict):
        raise ParseError("catalog must be a JSON object", "$")

    tunnel_width = data.get("tunnel_width", DEFAULT_TUNNEL_WIDTH)
    tunnel_height = data.get("tunnel_height", DEFAULT_TUNNEL_HEIGHT)
    for key, v in (("tunnel_width", tunnel_width), ("tunnel_height", tunnel_height)):
        if not isinstance(v, (int, float)) or v <= 0:
            raise ParseError(f"{key} must be a positive number", f"$.{key}")
    assets_raw = data.get("assets", [])
    obstacles_raw = data.get("obstacles", [])
    if not isinstance(assets_raw, list):
        raise ParseError("assets must be a list", "$.assets")
    if not isinstance(obstacles_raw, list):
        raise ParseError("obstacles must be a list", "$.obstacles")

    groups: dict[str, list[TileAsset]] = {}
    seen: set[str] = set()
    for i, raw in enumerate(assets_raw):
        a = _parse_asset(raw, f"$.assets[{i}]", base, float(tunnel_width), obstacle=False)
        if a.id in seen:
            raise ParseError(f"duplicate asset id {a.id!r}", f"$.assets[{i}].id")
        seen.add(a.id)
        groups.setdefault(a.kind, []).append(a)
    obstacles = []
    for i, raw in enumerate(obstacles_raw):
        a = _parse_asset(raw, f"$.obstacles[{i}]", base, float(tunnel_width), obstacle=True)
        if a.id in seen:
            raise ParseError(f"duplicate asset id {a.id!r}", f"$.obstacles[{i}].id")
        seen.add(a.id)
        obstacles.append(a)

    missing = [k for k in TILE_KINDS if not groups.get(k)]
    if missing:
        if not fallback:
            raise CatalogIncomplete(f"catalog has no assets for: {', '.join(missing)}")
        given = [a for g in groups.values() for a in g]
        size = given[0].footprint if given else None
        height = max((a.nominal_size[2] for a in given if a.kind != SHAFT), default=tunnel_height)
        shaft = groups.get(SHAFT)
        level_height = shaft[0].nominal_size[2] if shaft else None
        for a in builtin_tiles(float(tunnel_width), float(height), size, level_height):
            if a.kind in missing:
                groups[a.kind] = [a]
    if not obstacles:
        obstacles = [builtin_rock(float(tunnel_width))]

    sizes = {round(a.footprint, 9) for g in groups.values() for a in g}
    if len(sizes) > 1:
        raise ParseError(f"all tiles must share one footprint edge, found {sorted(sizes)}", "$.assets")
    return TileCatalog(groups, obstacles, float(tunnel_width))
