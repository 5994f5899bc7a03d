"""
Constraint node sets and their paired objective nodes.

A requirement (junction, loop or intersection) is stamped as a small set of
cells around a start cell ``s``; every arm cell is then paired with an
objective cell obtained by translating it away from ``s``. Paths are later
carved between each arm and its objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import GridError, PlacementExhausted
from .grid import CARDINALS, DOWN, LEFT, RIGHT, UP, Cell, DirVec, GridDims

MAX_PLACEMENT_ATTEMPTS = 64


class Unit(str, Enum):
    JUNCTION = "J"
    LOOP = "L"
    INTERSECTION = "I"


UNIT_ORDER = (Unit.JUNCTION, Unit.LOOP, Unit.INTERSECTION)


@dataclass(frozen=True)
class UnitRequirement:
    unit: Unit
    level: int


@dataclass
class ConstraintBundle:
    start: Cell
    requirement: UnitRequirement
    rotation: int
    constraints: list[Cell]
    objectives: list[Cell]

    def __post_init__(self):
        if len(self.constraints) != len(self.objectives):
            raise GridError("each constraint needs exactly one objective")

    @property
    def unit(self) -> Unit:
        return self.requirement.unit

    @property
    def cells(self) -> list[Cell]:
        """Cells stamped for this bundle: the start followed by the constraints."""
        return [self.start, *self.constraints]

    @property
    def reserved(self) -> list[Cell]:
        """Cells that must stay empty for the unit to keep its type (the closed side of a junction)."""
        return _reserved_of(self.start, self.unit, self.rotation)

    def pairs(self):
        return zip(self.constraints, self.objectives)

    def to_dict(self) -> dict:
        return {
            "unit": self.unit.value,
            "level": self.requirement.level,
            "start": list(self.start),
            "rotation": self.rotation,
            "constraints": [list(c) for c in self.constraints],
            "objectives": [list(o) for o in self.objectives],
        }


@dataclass
class LevelRequest:
    """Minimum unit counts for one level plus optional random fill."""

    junctions: int = 0
    loops: int = 0
    intersections: int = 0
    fill: int = 0
    fill_units: tuple[Unit, ...] = UNIT_ORDER

    def counts(self) -> dict[Unit, int]:
        return {Unit.JUNCTION: self.junctions, Unit.LOOP: self.loops, Unit.INTERSECTION: self.intersections}

    @property
    def total(self) -> int:
        return self.junctions + self.loops + self.intersections + self.fill


def offsets_for(unit: Unit) -> list[DirVec]:
    junction = [UP, DOWN, RIGHT]
    if unit is Unit.JUNCTION:
        return junction
    intersection = junction + [LEFT]
    if unit is Unit.INTERSECTION:
        return intersection
    diagonals = [(UP, RIGHT), (UP, LEFT), (DOWN, RIGHT), (DOWN, LEFT)]
    return intersection + [DirVec(a.dx + b.dx, a.dy + b.dy) for a, b in diagonals]


def rotate_offsets(offsets: Sequence[DirVec], rotation: int) -> list[DirVec]:
    return [DirVec(*d).rotated(rotation) for d in offsets]


def build_constraint_set(start: Cell, unit: Unit, rotation: int, dims: GridDims) -> list[Cell]:
    """``[s] + s (+) offsets``; only junctions are rotated, loops and intersections are symmetric."""
    offsets = rotate_offsets(offsets_for(unit), rotation) if unit is Unit.JUNCTION else offsets_for(unit)
    cells = [Cell(*start)] + [Cell(start.x + d.dx, start.y + d.dy) for d in offsets]
    for c in cells:
        if not dims.contains(c):
            raise GridError(f"constraint cell {tuple(c)} of {unit.name} at {tuple(start)} leaves the grid")
    return cells


def translate_objective(
    c: Cell, s: Cell, dims: GridDims, delta: int, t: int, mu: int, horizontal: bool | None = None
) -> Cell:
    """Objective for constraint ``c`` given explicit draws; result clamped into the grid.

    A constraint vertically offset from the start (same column) translates
    horizontally by ``delta * t`` with lateral jitter ``mu``; one offset
    horizontally translates vertically. Diagonal constraints take the axis
    from ``horizontal``.
    """
    if c.x == s.x and c.y != s.y:
        horizontal = True
    elif c.y == s.y and c.x != s.x:
        horizontal = False
    elif horizontal is None:
        raise GridError(f"constraint {tuple(c)} is diagonal to {tuple(s)}; an axis must be given")
    if horizontal:
        x, y = c.x + delta * t, c.y + mu
    else:
        x, y = c.x + mu, c.y + delta * t
    return Cell(min(max(x, 0), dims.cols - 1), min(max(y, 0), dims.rows - 1))


def sample_objective(c: Cell, s: Cell, dims: GridDims, rng: np.random.Generator) -> Cell:
    delta = int(rng.choice((-1, 1)))
    mu = int(rng.integers(-2, 3))
    horizontal = None
    if c.x != s.x and c.y != s.y:
        horizontal = bool(rng.integers(0, 2))
    elif c.x == s.x:
        horizontal = True
    else:
        horizontal = False
    t = int(rng.integers(2, (dims.cols if horizontal else dims.rows) + 1))
    o = translate_objective(c, s, dims, delta, t, mu, horizontal)
    if o == c:
        o = translate_objective(c, s, dims, -delta, t, mu, horizontal)
    if o == c:
        o = _nudge_to_center(c, dims, horizontal)
    return o


def _nudge_to_center(c: Cell, dims: GridDims, horizontal: bool) -> Cell:
    if horizontal:
        return Cell(c.x + (1 if 2 * c.x < dims.cols - 1 else -1), c.y)
    return Cell(c.x, c.y + (1 if 2 * c.y < dims.rows - 1 else -1))


def _avoid(o: Cell, c: Cell, dims: GridDims, blocked: set[Cell]) -> Cell:
    """Shift an objective off reserved cells (closest free cardinal, then ring)."""
    if o not in blocked:
        return o
    for radius in range(1, max(dims.rows, dims.cols)):
        for d in CARDINALS:
            cand = Cell(o.x + d.dx * radius, o.y + d.dy * radius)
            if dims.contains(cand) and cand not in blocked and cand != c:
                return cand
    return o


def place_bundle(
    requirement: UnitRequirement,
    rotation: int,
    dims: GridDims,
    rng: np.random.Generator,
    taken: set[Cell],
    attempts: int = MAX_PLACEMENT_ATTEMPTS,
) -> tuple[Cell, list[Cell]]:
    """Sample a start cell whose constraint set fits and avoids ``taken``."""
    for _ in range(attempts):
        s = Cell(int(rng.integers(0, dims.cols)), int(rng.integers(0, dims.rows)))
        try:
            cells = build_constraint_set(s, requirement.unit, rotation, dims)
        except GridError:
            continue
        footprint = set(cells) | set(_reserved_of(s, requirement.unit, rotation))
        if footprint & taken:
            continue
        return s, cells
    raise PlacementExhausted(
        f"no room for {requirement.unit.name} on level {requirement.level} "
        f"({dims.rows}x{dims.cols}) after {attempts} attempts"
    )


def _reserved_of(s: Cell, unit: Unit, rotation: int) -> list[Cell]:
    if unit is not Unit.JUNCTION:
        return []
    closed = LEFT.rotated(rotation)
    return [Cell(s.x + closed.dx, s.y + closed.dy)]


def _requirement_sequence(req: LevelRequest, level: int, rng: np.random.Generator) -> list[UnitRequirement]:
    seq = [UnitRequirement(u, level) for u in UNIT_ORDER for _ in range(req.counts()[u])]
    fill_units = tuple(req.fill_units) or UNIT_ORDER
    for _ in range(req.fill):
        seq.append(UnitRequirement(fill_units[int(rng.integers(0, len(fill_units)))], level))
    return seq


def distribute(dims: GridDims, requests: Sequence[LevelRequest], rng: np.random.Generator) -> list[list[ConstraintBundle]]:
    """Constraint bundles for every level.

    Draw order is fixed: level, then requirement (junctions, loops,
    intersections, random fill), then start/rotation, then objectives in
    constraint order. Constraint footprints on one level never overlap, so
    each requested unit survives as its own structure.
    """
    if len(requests) != dims.levels:
        raise GridError(f"got {len(requests)} level requests for {dims.levels} levels")
    out: list[list[ConstraintBundle]] = []
    for level, req in enumerate(requests):
        bundles: list[ConstraintBundle] = []
        taken: set[Cell] = set()
        for requirement in _requirement_sequence(req, level, rng):
            rotation = int(rng.integers(0, 4))
            if requirement.unit is not Unit.JUNCTION:
                rotation = 0
            try:
                s, cells = place_bundle(requirement, rotation, dims, rng, taken)
            except PlacementExhausted as exc:
                raise PlacementExhausted(f"level {level}, requirement #{len(bundles)}: {exc}") from None
            arms = cells[1:]
            objectives = [sample_objective(c, s, dims, rng) for c in arms]
            bundle = ConstraintBundle(s, requirement, rotation, arms, objectives)
            taken |= set(cells) | set(bundle.reserved)
            bundles.append(bundle)
        out.append(clear_reserved(bundles, dims))
    return out


def clear_reserved(bundles: list[ConstraintBundle], dims: GridDims) -> list[ConstraintBundle]:
    """Move objectives that landed on any bundle's reserved cell."""
    blocked = {r for b in bundles for r in b.reserved}
    if not blocked:
        return bundles
    for b in bundles:
        b.objectives = [_avoid(o, c, dims, blocked) for c, o in b.pairs()]
    return bundles


def reroot_bundle(
    bundle: ConstraintBundle,
    start: Cell,
    dims: GridDims,
    rng: np.random.Generator,
    others: Sequence[ConstraintBundle] = (),
) -> ConstraintBundle | None:
    """Move ``bundle`` so its start sits on ``start``; None when it cannot fit there."""
    taken = {c for b in others for c in (*b.cells, *b.reserved)}
    unit = bundle.unit
    rotations = [(bundle.rotation + k) % 4 for k in range(4)] if unit is Unit.JUNCTION else [0]
    for rotation in rotations:
        try:
            cells = build_constraint_set(start, unit, rotation, dims)
        except GridError:
            continue
        if (set(cells) | set(_reserved_of(start, unit, rotation))) & taken:
            continue
        arms = cells[1:]
        objectives = [sample_objective(c, start, dims, rng) for c in arms]
        return ConstraintBundle(Cell(*start), bundle.requirement, rotation, arms, objectives)
    return None
