"""
Guided path carving.

The straight segment between a constraint cell and its objective is bent by a
harmonic route descriptor, sampled, and rasterised into "guide" cells. A cost
matrix charges 1 on guide cells and a finite penalty elsewhere; Dijkstra then
carves the cheapest 4-connected path, which is unioned into the level.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import DegeneratePair, GridError
from .grid import CARDINALS, Cell, GridDims, OccupancyGrid, union_path
from .structural import ConstraintBundle, clear_reserved, reroot_bundle

DEFAULT_PENALTY = 100.0
DEFAULT_AMPLITUDE_FRACTION = 0.25
DEFAULT_SAMPLING_FACTOR = 2.0
# Multiplier on the penalty for reserved cells (closed side of a junction).
RESERVED_FACTOR = 1000.0
_FLOOR_EPS = 1e-9

HARMONIC_NAMES = {0: "linear", 1: "parabolic", 2: "sine"}


@dataclass(frozen=True)
class RouteDescriptor:
    harmonics: int = 0
    amplitude_fraction: float = DEFAULT_AMPLITUDE_FRACTION
    sampling_factor: float = DEFAULT_SAMPLING_FACTOR
    connected: bool = False

    def __post_init__(self):
        if self.harmonics not in (0, 1, 2):
            raise ValueError(f"harmonics must be 0, 1 or 2, got {self.harmonics}")
        if not 0 < self.amplitude_fraction <= 0.5:
            raise ValueError(f"amplitude_fraction must be in (0, 0.5], got {self.amplitude_fraction}")
        if self.sampling_factor < 1:
            raise ValueError(f"sampling_factor must be >= 1, got {self.sampling_factor}")

    @classmethod
    def named(cls, name: str, **kw) -> "RouteDescriptor":
        by_name = {v: k for k, v in HARMONIC_NAMES.items()}
        if name not in by_name:
            raise ValueError(f"unknown route descriptor {name!r}; choose from {sorted(by_name)}")
        return cls(by_name[name], **kw)

    @property
    def name(self) -> str:
        return HARMONIC_NAMES[self.harmonics]

    def amplitude(self, dims: GridDims) -> float:
        return self.amplitude_fraction * min(dims.rows, dims.cols)


def segment_samples(c: Cell, o: Cell, sampling_factor: float) -> list[float]:
    """Normalised parameters ``s / S`` for ``s = 0..S``, ``S = ceil(factor * |o - c|)``."""
    if tuple(c) == tuple(o):
        raise DegeneratePair(f"constraint and objective coincide at {tuple(c)}")
    length = math.hypot(o[0] - c[0], o[1] - c[1])
    n = math.ceil(sampling_factor * length - 1e-12)
    return [s / n for s in range(n + 1)]


def route_offset(p: float, descriptor: RouteDescriptor, dims: GridDims) -> float:
    return descriptor.amplitude(dims) * math.sin(descriptor.harmonics * math.pi * p)


def discretize_guide(
    c: Cell, o: Cell, descriptor: RouteDescriptor, dims: GridDims, connect: bool = False
) -> list[Cell]:
    """Ordered, de-duplicated guide cells from ``c`` to ``o``, clamped into the grid.

    Only the sampled points are returned, so steep stretches of the curve
    leave gaps that Dijkstra bridges through penalty cells (or cuts across).
    With ``connect`` consecutive samples are joined by a 4-connected raster
    line instead and carved paths trace the curve exactly.
    """
    ps = segment_samples(c, o, descriptor.sampling_factor)
    n = len(ps) - 1
    dx, dy = o[0] - c[0], o[1] - c[1]
    length = math.hypot(dx, dy)
    # unit normal (-dy, dx) / L
    nx, ny = -dy / length, dx / length
    samples = [Cell(*c)]
    for s, p in enumerate(ps):
        off = route_offset(p, descriptor, dims)
        # integer numerator keeps the undistorted points exact
        xp = c[0] + (dx * s) / n + off * nx
        yp = c[1] + (dy * s) / n + off * ny
        samples.append(
            Cell(
                min(max(math.floor(xp + _FLOOR_EPS), 0), dims.cols - 1),
                min(max(math.floor(yp + _FLOOR_EPS), 0), dims.rows - 1),
            )
        )
    samples.append(Cell(*o))
    if connect:
        joined = [samples[0]]
        for a, b in zip(samples, samples[1:]):
            joined.extend(raster_line(a, b)[1:])
        samples = joined
    return list(dict.fromkeys(samples))


def raster_line(a: Cell, b: Cell) -> list[Cell]:
    """4-connected cells from ``a`` to ``b`` inclusive, hugging the straight segment."""
    dx, dy = b.x - a.x, b.y - a.y
    sx, sy = (dx > 0) - (dx < 0), (dy > 0) - (dy < 0)
    ax, ay = abs(dx), abs(dy)
    x, y = a
    ix = iy = 0
    out = [Cell(x, y)]
    while ix < ax or iy < ay:
        # step along x while its next half-cell crossing comes first
        if (1 + 2 * ix) * ay < (1 + 2 * iy) * ax:
            x += sx
            ix += 1
        else:
            y += sy
            iy += 1
        out.append(Cell(x, y))
    return out


def build_cost_matrix(
    guide: Iterable[Cell], dims: GridDims, penalty: float = DEFAULT_PENALTY, reserved: Iterable[Cell] = ()
) -> np.ndarray:
    """Rows x cols float matrix: 1 on guide cells, ``penalty`` elsewhere.

    ``reserved`` cells cost ``penalty * RESERVED_FACTOR`` so paths only cross
    them when nothing else connects the endpoints.
    """
    guide = list(guide)
    if not guide:
        raise GridError("guide must contain at least one cell")
    if not penalty > 1 or not math.isfinite(penalty):
        raise ValueError(f"penalty must be finite and > 1, got {penalty}")
    cost = np.full((dims.rows, dims.cols), float(penalty))
    for p in reserved:
        if dims.contains(p):
            cost[p.y, p.x] = penalty * RESERVED_FACTOR
    xs, ys = zip(*guide)
    cost[list(ys), list(xs)] = 1.0
    return cost


def path_cost(cost: np.ndarray, path: Sequence[Cell]) -> float:
    """Sum of entry costs; the start cell is free."""
    return float(sum(cost[p.y, p.x] for p in path[1:]))


def shortest_path(cost: np.ndarray, c: Cell, o: Cell) -> list[Cell]:
    """Node-weighted Dijkstra on the 4-neighbourhood.

    Entering a cell costs its matrix value. Ties in the frontier break on
    ``(y, x)``, neighbours expand up, down, left, right, and a predecessor is
    only replaced on a strict improvement, so the result is deterministic.
    """
    rows, cols = cost.shape
    c, o = Cell(*c), Cell(*o)
    for p in (c, o):
        if not (0 <= p.x < cols and 0 <= p.y < rows):
            raise GridError(f"{tuple(p)} outside cost matrix {rows}x{cols}")
    weights = cost.tolist()
    dist = [[math.inf] * cols for _ in range(rows)]
    prev: dict[tuple[int, int], tuple[int, int]] = {}
    dist[c.y][c.x] = 0.0
    heap = [(0.0, c.y, c.x)]
    done = [[False] * cols for _ in range(rows)]
    steps = [(d.dy, d.dx) for d in CARDINALS]
    while heap:
        d, y, x = heapq.heappop(heap)
        if done[y][x]:
            continue
        done[y][x] = True
        if y == o.y and x == o.x:
            break
        for sy, sx in steps:
            ny, nx = y + sy, x + sx
            if 0 <= ny < rows and 0 <= nx < cols and not done[ny][nx]:
                nd = d + weights[ny][nx]
                if nd < dist[ny][nx]:
                    dist[ny][nx] = nd
                    prev[(ny, nx)] = (y, x)
                    heapq.heappush(heap, (nd, ny, nx))
    path = [o]
    node = (o.y, o.x)
    while node != (c.y, c.x):
        node = prev[node]
        path.append(Cell(node[1], node[0]))
    path.reverse()
    return path


def carve(
    grid: OccupancyGrid,
    level: int,
    c: Cell,
    o: Cell,
    descriptor: RouteDescriptor,
    penalty: float = DEFAULT_PENALTY,
    reserved: Iterable[Cell] = (),
) -> list[Cell]:
    guide = discretize_guide(c, o, descriptor, grid.dims, connect=descriptor.connected)
    path = shortest_path(build_cost_matrix(guide, grid.dims, penalty, reserved), c, o)
    union_path(grid, level, path)
    return path


def generate_level(
    grid: OccupancyGrid,
    level: int,
    bundles: Sequence[ConstraintBundle],
    descriptor: RouteDescriptor,
    penalty: float = DEFAULT_PENALTY,
    extra_pairs: Sequence[tuple[Cell, Cell]] = (),
    join: bool = True,
) -> OccupancyGrid:
    """Stamp every bundle, then carve each (constraint, objective) pair in bundle order.

    ``extra_pairs`` are carved last (used to tie a shaft cell into the level).
    With ``join`` any pieces of the level left disconnected are then linked
    by short connectors (see ``join_components``).
    """
    reserved = [r for b in bundles for r in b.reserved]
    for b in bundles:
        union_path(grid, level, b.cells)
    for b in bundles:
        for c, o in b.pairs():
            carve(grid, level, c, o, descriptor, penalty, reserved)
    for c, o in extra_pairs:
        if c != o:
            carve(grid, level, c, o, descriptor, penalty, reserved)
        else:
            union_path(grid, level, [c])
    if join:
        join_components(grid, level, penalty, reserved)
    return grid


def join_components(
    grid: OccupancyGrid, level: int, penalty: float = DEFAULT_PENALTY, reserved: Iterable[Cell] = ()
) -> list[list[Cell]]:
    """Connect every 4-connected component of a level to the first one.

    Repeatedly finds the closest (taxicab) pair of cells between the
    component containing the first occupied cell in raster order and any
    other component, and carves a cheapest path between them over a uniform
    cost matrix that still avoids reserved cells. Returns the connectors.
    """
    reserved = list(reserved)
    dims = grid.dims
    carved = []
    while True:
        labels, n = ndimage.label(grid.cells[level])
        if n <= 1:
            return carved
        main = labels == 1
        # distance from every cell to the main component, and which main cell is nearest
        dist, (iy, ix) = ndimage.distance_transform_cdt(~main, metric="taxicab", return_indices=True)
        others = labels > 1
        flat = np.where(others, dist, np.iinfo(dist.dtype).max).ravel()
        k = int(np.argmin(flat))  # first minimum in raster order
        y, x = divmod(k, dims.cols)
        a = Cell(int(ix[y, x]), int(iy[y, x]))
        b = Cell(x, y)
        cost = np.full((dims.rows, dims.cols), 1.0)
        for r in reserved:
            if dims.contains(r):
                cost[r.y, r.x] = penalty * RESERVED_FACTOR
        path = shortest_path(cost, a, b)
        union_path(grid, level, path)
        carved.append(path)


def generate_world(
    grid: OccupancyGrid,
    bundles: list[list[ConstraintBundle]],
    descriptor: RouteDescriptor,
    rng: np.random.Generator,
    penalty: float = DEFAULT_PENALTY,
) -> OccupancyGrid:
    """Carve all levels bottom-up, linking each level to the next with a shaft.

    The shaft cell is an objective of level ``k`` chosen uniformly; level
    ``k + 1``'s first bundle is re-rooted on it when the unit fits there,
    otherwise a connector path from the shaft cell to that bundle's first
    constraint is carved. ``bundles`` is updated in place with re-rooted sets.
    """
    dims = grid.dims
    if dims.levels > 1 and not all(bundles):
        raise GridError("every level of a multi-level world needs at least one constraint bundle")
    generate_level(grid, 0, bundles[0], descriptor, penalty)
    for level in range(1, dims.levels):
        here = bundles[level]
        shaft = pick_shaft(bundles[level - 1], here, rng)
        extra: list[tuple[Cell, Cell]] = []
        moved = reroot_bundle(here[0], shaft, dims, rng, here[1:])
        if moved is not None:
            here[0] = moved
            clear_reserved(here, dims)
        else:
            extra.append((shaft, here[0].constraints[0]))
        generate_level(grid, level, here, descriptor, penalty, extra)
        grid.add_shaft(level - 1, shaft)
    return grid


def pick_shaft(below: Sequence[ConstraintBundle], above: Sequence[ConstraintBundle], rng: np.random.Generator) -> Cell:
    """Uniform choice among the lower level's objectives, skipping cells reserved above."""
    objectives = [o for b in below for o in b.objectives]
    reserved = {r for b in above for r in b.reserved}
    candidates = [o for o in objectives if o not in reserved] or objectives
    return candidates[int(rng.integers(0, len(candidates)))]
