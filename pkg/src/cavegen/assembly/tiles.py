"""
Tile assets and the builtin box-section tunnel primitives.

Tiles are authored centred on the origin of their footprint, floor at z=0,
with ports in the canonical orientation of their topometric type (deadend
opens right, pathway left-right, corner right-down, junction up-down-right,
intersection everywhere). Every builtin port is the same ``w x h`` rectangle
centred on its edge, so any two builtin tiles mate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..grid import CANONICAL_PORTS, DIR_NAMES, RIGHT, DirVec, TopometricType, dirs_of
from .mesh import Mesh

SHAFT = "shaft"
TILE_KINDS = tuple(t.value for t in TopometricType) + (SHAFT,)
TEXTURE_SLOTS = ("cave_wall", "rock_pile", "striated_rock")

DEFAULT_TUNNEL_WIDTH = 4.0
DEFAULT_TUNNEL_HEIGHT = 4.0


@dataclass
class TileAsset:
    id: str
    kind: str  # a TopometricType value or "shaft"
    mesh_source: dict | str  # {"builtin": name} or a path to an OBJ file
    nominal_size: tuple[float, float, float]
    port_edges: frozenset[str] = frozenset()
    texture_slots: dict[str, str] = field(default_factory=dict)
    tunnel_width: float | None = None
    mesh: Mesh | None = field(default=None, repr=False, compare=False)

    @property
    def footprint(self) -> float:
        return self.nominal_size[0]

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "type": self.kind,
            "mesh": self.mesh_source,
            "nominal_size": list(self.nominal_size),
            "port_edges": sorted(self.port_edges),
        }
        if self.texture_slots:
            out["textures"] = dict(sorted(self.texture_slots.items()))
        if self.tunnel_width is not None:
            out["tunnel_width"] = self.tunnel_width
        return out


def canonical_port_names(kind: str) -> frozenset[str]:
    if kind == SHAFT:
        return frozenset()
    return frozenset(DIR_NAMES[d] for d in dirs_of(CANONICAL_PORTS[TopometricType(kind)]))


class _Builder:
    def __init__(self):
        self.index: dict[tuple[float, float, float], int] = {}
        self.verts: list[tuple[float, float, float]] = []
        self.faces: list[tuple[int, int, int]] = []

    def v(self, p) -> int:
        key = tuple(round(float(c), 9) + 0.0 for c in p)
        if key not in self.index:
            self.index[key] = len(self.verts)
            self.verts.append(key)
        return self.index[key]

    def quad(self, a, b, c, d) -> None:
        ia, ib, ic, id_ = (self.v(p) for p in (a, b, c, d))
        self.faces += [(ia, ib, ic), (ia, ic, id_)]

    def mesh(self) -> Mesh:
        return Mesh(np.array(self.verts), np.array(self.faces))


def _rot(p, d: DirVec):
    """Rotate a point given in the RIGHT-facing frame so it faces ``d``."""
    x, y, z = p
    turns = [RIGHT.rotated(k) for k in range(4)].index(d)
    for _ in range(turns):
        x, y = -y, x
    return (x, y, z)


def tunnel_tile_mesh(ports: frozenset[str] | set[str], tile_size: float, width: float, height: float) -> Mesh:
    """Box-section tunnel: a central hub plus one arm per port, open only at the ports."""
    from ..grid import DIR_BY_NAME, CARDINALS

    half, hw, h = tile_size / 2.0, width / 2.0, height
    b = _Builder()
    b.quad((-hw, -hw, 0), (hw, -hw, 0), (hw, hw, 0), (-hw, hw, 0))
    b.quad((-hw, -hw, h), (-hw, hw, h), (hw, hw, h), (hw, -hw, h))
    port_dirs = {DIR_BY_NAME[p] for p in ports}
    for d in CARDINALS:
        if d in port_dirs:
            # arm from the hub face out to the tile edge, authored facing +x
            pts = {
                "f": [(hw, -hw, 0), (half, -hw, 0), (half, hw, 0), (hw, hw, 0)],
                "c": [(hw, -hw, h), (hw, hw, h), (half, hw, h), (half, -hw, h)],
                "l": [(hw, -hw, 0), (hw, -hw, h), (half, -hw, h), (half, -hw, 0)],
                "r": [(hw, hw, 0), (half, hw, 0), (half, hw, h), (hw, hw, h)],
            }
            for quad in pts.values():
                b.quad(*(_rot(p, d) for p in quad))
        else:
            wall = [(hw, -hw, 0), (hw, hw, 0), (hw, hw, h), (hw, -hw, h)]
            b.quad(*(_rot(p, d) for p in wall))
    return b.mesh()


def shaft_mesh(width: float, span: float) -> Mesh:
    """Vertical square tube, open top and bottom."""
    hw = width / 2.0
    b = _Builder()
    corners = [(-hw, -hw), (hw, -hw), (hw, hw), (-hw, hw)]
    for (x0, y0), (x1, y1) in zip(corners, corners[1:] + corners[:1]):
        b.quad((x0, y0, 0), (x1, y1, 0), (x1, y1, span), (x0, y0, span))
    return b.mesh()


def rock_mesh(radius: float) -> Mesh:
    """Closed octahedron standing on z=0."""
    r = radius
    pts = [(r, 0, r), (-r, 0, r), (0, r, r), (0, -r, r), (0, 0, 2 * r), (0, 0, 0)]
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4), (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    return Mesh(np.array(pts, dtype=float), np.array(faces))


def builtin_tiles(
    tunnel_width: float = DEFAULT_TUNNEL_WIDTH,
    tunnel_height: float = DEFAULT_TUNNEL_HEIGHT,
    tile_size: float | None = None,
    level_height: float | None = None,
) -> list[TileAsset]:
    """One builtin asset per topometric type plus a shaft spanning one level height.

    ``tile_size`` defaults to twice the tunnel width and ``level_height`` to
    twice the tunnel height.
    """
    if tunnel_width <= 0 or tunnel_height <= 0:
        raise ValueError("tunnel dimensions must be positive")
    tile_size = tile_size or 2.0 * tunnel_width
    level_height = level_height or 2.0 * tunnel_height
    if tunnel_width >= tile_size:
        raise ValueError("tunnel must be narrower than the tile")
    assets = []
    for topo in TopometricType:
        ports = canonical_port_names(topo.value)
        assets.append(
            TileAsset(
                id=f"builtin-{topo.value}",
                kind=topo.value,
                mesh_source={"builtin": topo.value},
                nominal_size=(tile_size, tile_size, tunnel_height),
                port_edges=ports,
                tunnel_width=tunnel_width,
                mesh=tunnel_tile_mesh(ports, tile_size, tunnel_width, tunnel_height),
            )
        )
    assets.append(
        TileAsset(
            id="builtin-shaft",
            kind=SHAFT,
            mesh_source={"builtin": SHAFT},
            nominal_size=(tile_size, tile_size, level_height),
            tunnel_width=tunnel_width,
            mesh=shaft_mesh(tunnel_width, level_height),
        )
    )
    return assets


def builtin_rock(tunnel_width: float = DEFAULT_TUNNEL_WIDTH) -> TileAsset:
    r = tunnel_width / 8.0
    return TileAsset(
        id="builtin-rock",
        kind="obstacle",
        mesh_source={"builtin": "rock"},
        nominal_size=(2 * r, 2 * r, 2 * r),
        mesh=rock_mesh(r),
    )
