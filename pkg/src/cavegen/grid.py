"""
Occupancy grid, direction algebra and topometric classification.

Coordinates: ``x`` is the column, ``y`` the row, origin top-left, ``y`` grows
downward. A rotation step ``(dx, dy) -> (-dy, dx)`` therefore turns a
direction clockwise on screen: right -> down -> left -> up -> right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

import numpy as np
from scipy import ndimage

from .errors import GridError, IsolatedCellError, ParseError

FORMAT_VERSION = 1


class Cell(NamedTuple):
    x: int
    y: int


class DirVec(NamedTuple):
    dx: int
    dy: int

    def rotated(self, quarter_turns: int = 1) -> "DirVec":
        dx, dy = self
        for _ in range(quarter_turns % 4):
            dx, dy = -dy, dx
        return DirVec(dx, dy)


UP = DirVec(0, -1)
DOWN = DirVec(0, 1)
LEFT = DirVec(-1, 0)
RIGHT = DirVec(1, 0)
# Bit order of neighbour masks and expansion order everywhere.
CARDINALS: tuple[DirVec, ...] = (UP, DOWN, LEFT, RIGHT)
DIR_NAMES = {UP: "up", DOWN: "down", LEFT: "left", RIGHT: "right"}
DIR_BY_NAME = {v: k for k, v in DIR_NAMES.items()}


def step(p: Cell, d: DirVec) -> Cell:
    return Cell(p.x + d.dx, p.y + d.dy)


class TopometricType(str, Enum):
    DEADEND = "deadend"
    PATHWAY = "pathway"
    CORNER = "corner"
    JUNCTION = "junction"
    INTERSECTION = "intersection"

    @property
    def glyph(self) -> str:
        return self.name[0]


TOPO_ORDER = tuple(TopometricType)


def mask_of(dirs: Iterable[DirVec]) -> int:
    mask = 0
    for d in dirs:
        mask |= 1 << CARDINALS.index(d)
    return mask


def dirs_of(mask: int) -> list[DirVec]:
    return [d for i, d in enumerate(CARDINALS) if mask >> i & 1]


def format_mask(mask: int) -> str:
    """Bits as a string in (up, down, left, right) order, e.g. ``"0011"`` for left+right."""
    return "".join("1" if mask >> i & 1 else "0" for i in range(4))


def rotate_mask(mask: int, quarter_turns: int) -> int:
    return mask_of(d.rotated(quarter_turns) for d in dirs_of(mask))


CANONICAL_PORTS: dict[TopometricType, int] = {
    TopometricType.DEADEND: mask_of([RIGHT]),
    TopometricType.PATHWAY: mask_of([LEFT, RIGHT]),
    TopometricType.CORNER: mask_of([RIGHT, DOWN]),
    TopometricType.JUNCTION: mask_of([UP, DOWN, RIGHT]),
    TopometricType.INTERSECTION: mask_of(CARDINALS),
}


def _build_table() -> dict[int, tuple[TopometricType, int]]:
    table = {}
    for topo, canon in CANONICAL_PORTS.items():
        for iota in range(4):
            table.setdefault(rotate_mask(canon, iota), (topo, 0 if topo is TopometricType.INTERSECTION else iota))
    return table


# mask -> (type, smallest rotation producing it); 15 entries, mask 0 absent
CLASSIFICATION = _build_table()


def classify_mask(mask: int) -> tuple[TopometricType, int]:
    try:
        return CLASSIFICATION[mask]
    except KeyError:
        raise GridError(f"mask {format_mask(mask)} has no occupied neighbour") from None


@dataclass(frozen=True)
class GridDims:
    levels: int
    rows: int
    cols: int

    def __post_init__(self):
        if self.levels < 1:
            raise GridError(f"need at least one level, got {self.levels}")
        if self.rows < 3 or self.cols < 3:
            raise GridError(f"grid must be at least 3x3 per level, got {self.rows}x{self.cols}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.levels, self.rows, self.cols)

    def contains(self, p: Cell) -> bool:
        return 0 <= p.x < self.cols and 0 <= p.y < self.rows


@dataclass
class OccupancyGrid:
    dims: GridDims
    cells: np.ndarray = None  # uint8, shape (levels, rows, cols)
    shafts: list[tuple[int, Cell]] = field(default_factory=list)
    seed: int | None = None

    def __post_init__(self):
        if self.cells is None:
            self.cells = np.zeros(self.dims.shape, dtype=np.uint8)
        elif self.cells.shape != self.dims.shape:
            raise GridError(f"cell array shape {self.cells.shape} does not match dims {self.dims.shape}")
        else:
            self.cells = np.ascontiguousarray(self.cells, dtype=np.uint8)

    @classmethod
    def empty(cls, levels: int, rows: int, cols: int, seed: int | None = None) -> "OccupancyGrid":
        return cls(GridDims(levels, rows, cols), seed=seed)

    @classmethod
    def from_rows(cls, *levels: Iterable[str], seed: int | None = None) -> "OccupancyGrid":
        """Build from per-level row strings; ``'#'``/``'1'`` mark occupied cells."""
        arr = np.array(
            [[[1 if ch in "#1" else 0 for ch in row] for row in level] for level in levels], dtype=np.uint8
        )
        return cls(GridDims(*arr.shape), arr, seed=seed)

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return (
            self.dims == other.dims
            and np.array_equal(self.cells, other.cells)
            and self.shafts == other.shafts
            and self.seed == other.seed
        )

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.dims, self.cells.copy(), list(self.shafts), self.seed)

    def check(self, level: int, p: Cell) -> None:
        if not (0 <= level < self.dims.levels and self.dims.contains(p)):
            raise GridError(f"cell {tuple(p)} on level {level} is outside grid {self.dims.shape}")

    def occupied(self, level: int, p: Cell) -> bool:
        """Out-of-bounds cells read as empty."""
        return self.dims.contains(p) and bool(self.cells[level, p.y, p.x])

    def occupied_cells(self, level: int) -> list[Cell]:
        ys, xs = np.nonzero(self.cells[level])
        return [Cell(int(x), int(y)) for y, x in zip(ys, xs)]

    def add_shaft(self, level: int, p: Cell) -> None:
        if not (self.occupied(level, p) and level + 1 < self.dims.levels and self.occupied(level + 1, p)):
            raise GridError(f"shaft at {tuple(p)} from level {level} must be occupied on both levels")
        self.shafts.append((level, Cell(*p)))


def neighbor_mask(grid: OccupancyGrid, level: int, p: Cell) -> int:
    grid.check(level, p)
    return mask_of(d for d in CARDINALS if grid.occupied(level, step(p, d)))


def classify_cell(grid: OccupancyGrid, level: int, p: Cell) -> tuple[TopometricType, int]:
    """Topometric type and clockwise rotation of an occupied cell.

    Raises IsolatedCellError for an occupied cell without occupied cardinal
    neighbours and GridError when the cell itself is empty.
    """
    mask = neighbor_mask(grid, level, p)
    if not grid.occupied(level, p):
        raise GridError(f"cell {tuple(p)} on level {level} is empty")
    if mask == 0:
        raise IsolatedCellError(level, p.x, p.y)
    return CLASSIFICATION[mask]


def union_path(grid: OccupancyGrid, level: int, path: Iterable[Cell]) -> OccupancyGrid:
    """Set every path cell; never clears. Mutates and returns ``grid``."""
    path = list(path)
    for p in path:
        grid.check(level, p)
    if path:
        xs, ys = zip(*path)
        grid.cells[level, list(ys), list(xs)] = 1
    return grid


def mask_array(level: np.ndarray) -> np.ndarray:
    """Vectorised neighbour masks for a whole level (0 where the cell is empty)."""
    occ = level.astype(bool)
    padded = np.pad(occ, 1)
    m = np.zeros(occ.shape, dtype=np.uint8)
    for i, d in enumerate(CARDINALS):
        nb = padded[1 + d.dy : 1 + d.dy + occ.shape[0], 1 + d.dx : 1 + d.dx + occ.shape[1]]
        m |= nb.astype(np.uint8) << i
    return np.where(occ, m, 0)


@dataclass
class UnitCounts:
    types: dict[TopometricType, int]
    loops: int
    isolated: int = 0

    def __getitem__(self, topo: TopometricType) -> int:
        return self.types.get(topo, 0)


def loop_count(level: np.ndarray) -> int:
    """Independent cycles E - V + C of the 4-connected occupancy graph."""
    occ = level.astype(bool)
    v = int(occ.sum())
    e = int((occ[:, 1:] & occ[:, :-1]).sum() + (occ[1:, :] & occ[:-1, :]).sum())
    _, c = ndimage.label(occ)
    return e - v + c


def count_units(grid: OccupancyGrid, level: int) -> UnitCounts:
    masks = mask_array(grid.cells[level])
    occ = grid.cells[level].astype(bool)
    types = {t: 0 for t in TOPO_ORDER}
    for mask, n in zip(*np.unique(masks[occ], return_counts=True)):
        if mask == 0:
            continue
        types[CLASSIFICATION[int(mask)][0]] += int(n)
    isolated = int((occ & (masks == 0)).sum())
    return UnitCounts(types, loop_count(grid.cells[level]), isolated)


# -- persistence --------------------------------------------------------------


def dumps_occupancy(grid: OccupancyGrid) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "dims": {"l": grid.dims.levels, "m": grid.dims.rows, "n": grid.dims.cols},
        "seed": grid.seed,
        "levels": [["".join("1" if v else "0" for v in row) for row in level] for level in grid.cells],
        "shafts": [{"level": k, "x": p.x, "y": p.y} for k, p in grid.shafts],
    }
    return json.dumps(doc, indent=1) + "\n"


def _line_of(text: str, needle: str, start_line: int = 1) -> int | None:
    for i, line in enumerate(text.splitlines()[start_line - 1 :], start_line):
        if needle in line:
            return i
    return None


def loads_occupancy(text: str) -> OccupancyGrid:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("occupancy document must be an object", "line 1")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {doc.get('format_version')!r}", _field_line(text, "format_version"))
    try:
        d = doc["dims"]
        dims = GridDims(int(d["l"]), int(d["m"]), int(d["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad dims: {exc}", _field_line(text, "dims")) from exc
    levels = doc.get("levels")
    if not isinstance(levels, list) or len(levels) != dims.levels:
        raise ParseError(f"expected {dims.levels} levels", _field_line(text, "levels"))
    cells = np.zeros(dims.shape, dtype=np.uint8)
    for k, rows in enumerate(levels):
        if not isinstance(rows, list) or len(rows) != dims.rows:
            raise ParseError(f"level {k} must have {dims.rows} rows", f"levels[{k}]")
        for y, row in enumerate(rows):
            if not isinstance(row, str) or len(row) != dims.cols or set(row) - {"0", "1"}:
                where = _line_of(text, json.dumps(row)) if isinstance(row, str) else None
                raise ParseError(
                    f"levels[{k}][{y}] must be a {dims.cols}-character 0/1 string",
                    f"line {where}" if where else f"levels[{k}][{y}]",
                )
            cells[k, y] = np.frombuffer(row.encode("ascii"), dtype=np.uint8) - ord("0")
    grid = OccupancyGrid(dims, cells, seed=doc.get("seed"))
    for i, s in enumerate(doc.get("shafts", [])):
        try:
            grid.add_shaft(int(s["level"]), Cell(int(s["x"]), int(s["y"])))
        except (KeyError, TypeError, ValueError, GridError) as exc:
            raise ParseError(f"bad shaft entry: {exc}", f"shafts[{i}]") from exc
    return grid


def _field_line(text: str, name: str) -> str:
    line = _line_of(text, f'"{name}"')
    return f"line {line}" if line else name


def save_occupancy(grid: OccupancyGrid, path) -> None:
    from .io import atomic_write

    atomic_write(path, dumps_occupancy(grid))


def load_occupancy(path) -> OccupancyGrid:
    with open(path, encoding="utf-8") as fh:
        return loads_occupancy(fh.read())
