import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavegen.config import resolve_preset
from cavegen.errors import GridError, PlacementExhausted
from cavegen.grid import DOWN, LEFT, UP, Cell, DirVec, GridDims
from cavegen.structural import (
    LevelRequest,
    Unit,
    build_constraint_set,
    distribute,
    offsets_for,
    reroot_bundle,
    rotate_offsets,
    sample_objective,
    translate_objective,
)


def test_unit_offsets():
    assert offsets_for(Unit.JUNCTION) == [(0, -1), (0, 1), (1, 0)]
    assert offsets_for(Unit.INTERSECTION) == [(0, -1), (0, 1), (1, 0), (-1, 0)]
    ring = offsets_for(Unit.LOOP)
    assert len(ring) == 8
    assert {tuple(d) for d in ring} == {(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)} - {(0, 0)}


def test_junction_turned_twice_opens_left():
    assert set(rotate_offsets(offsets_for(Unit.JUNCTION), 2)) == {UP, DOWN, LEFT}


def test_loop_fills_3x3():
    dims = GridDims(1, 3, 3)
    cells = build_constraint_set(Cell(1, 1), Unit.LOOP, 0, dims)
    assert set(cells) == {Cell(x, y) for x in range(3) for y in range(3)}
    assert cells[0] == Cell(1, 1)


def test_only_junctions_rotate():
    dims = GridDims(1, 5, 5)
    s = Cell(2, 2)
    assert build_constraint_set(s, Unit.INTERSECTION, 1, dims) == build_constraint_set(s, Unit.INTERSECTION, 0, dims)
    assert build_constraint_set(s, Unit.JUNCTION, 1, dims) != build_constraint_set(s, Unit.JUNCTION, 0, dims)


def test_constraint_set_must_fit():
    with pytest.raises(GridError):
        build_constraint_set(Cell(0, 1), Unit.INTERSECTION, 0, GridDims(1, 5, 5))


def test_translate_objective_axes():
    dims = GridDims(1, 20, 20)
    s = Cell(10, 10)
    # arm above the start (same column) moves sideways
    assert translate_objective(Cell(10, 9), s, dims, delta=1, t=4, mu=-1) == Cell(14, 8)
    # arm right of the start (same row) moves vertically
    assert translate_objective(Cell(11, 10), s, dims, delta=-1, t=3, mu=2) == Cell(13, 7)
    # clamped into the grid
    assert translate_objective(Cell(11, 10), s, dims, delta=1, t=20, mu=0) == Cell(11, 19)
    with pytest.raises(GridError):
        translate_objective(Cell(11, 11), s, dims, 1, 2, 0)


def test_objective_differs_and_stays_in_bounds():
    rng = np.random.default_rng(2024)
    n = 0
    while n < 10_000:
        rows, cols = (int(v) for v in rng.integers(3, 25, size=2))
        dims = GridDims(1, rows, cols)
        s = Cell(int(rng.integers(1, cols - 1)), int(rng.integers(1, rows - 1)))
        for d in offsets_for(Unit.LOOP):
            c = Cell(s.x + d.dx, s.y + d.dy)
            o = sample_objective(c, s, dims, rng)
            assert o != c and dims.contains(o)
            n += 1


def test_natural_cave_requests_within_table_ranges():
    for seed in range(60):
        spec = resolve_preset("natural-cave", seed)
        bundles = distribute(spec.dims, spec.requests, np.random.default_rng(seed))
        assert len(bundles) == 1
        units = [b.unit for b in bundles[0]]
        assert 0 <= units.count(Unit.LOOP) <= 2
        assert 1 <= units.count(Unit.JUNCTION) <= 3
        assert 1 <= units.count(Unit.INTERSECTION) <= 3


@given(st.integers(0, 2**32), st.integers(0, 3), st.integers(0, 2), st.integers(0, 2))
def test_footprints_disjoint_and_reserved_kept_clear(seed, j, lp, i):
    req = LevelRequest(j, lp, i, fill=0 if j + lp + i else 1)
    dims = GridDims(1, 6 * max(2, req.total), 6 * max(2, req.total))
    (bundles,) = distribute(dims, [req], np.random.default_rng(seed))
    assert len(bundles) == req.total
    seen = set()
    for b in bundles:
        foot = set(b.cells) | set(b.reserved)
        assert not foot & seen
        seen |= foot
        assert len(b.constraints) == {Unit.JUNCTION: 3, Unit.INTERSECTION: 4, Unit.LOOP: 8}[b.unit]
    reserved = {r for b in bundles for r in b.reserved}
    for b in bundles:
        assert not set(b.objectives) & reserved
        assert all(dims.contains(o) for o in b.objectives)


def test_reserved_cell_is_the_closed_side():
    dims = GridDims(1, 20, 20)
    (bundles,) = distribute(dims, [LevelRequest(junctions=4)], np.random.default_rng(3))
    for b in bundles:
        open_dirs = {DirVec(c.x - b.start.x, c.y - b.start.y) for c in b.constraints}
        (r,) = b.reserved
        closed = DirVec(r.x - b.start.x, r.y - b.start.y)
        assert closed not in open_dirs and len(open_dirs | {closed}) == 4


def test_placement_exhausted_on_tiny_grid():
    with pytest.raises(PlacementExhausted):
        distribute(GridDims(1, 3, 3), [LevelRequest(loops=2)], np.random.default_rng(0))


def test_distribute_is_deterministic():
    dims = GridDims(2, 20, 20)
    reqs = [LevelRequest(1, 1, 1), LevelRequest(2, 0, 1)]
    a = distribute(dims, reqs, np.random.default_rng(11))
    b = distribute(dims, reqs, np.random.default_rng(11))
    assert [[x.to_dict() for x in lvl] for lvl in a] == [[x.to_dict() for x in lvl] for lvl in b]


def test_reroot_moves_start():
    dims = GridDims(1, 12, 12)
    (bundles,) = distribute(dims, [LevelRequest(junctions=1)], np.random.default_rng(5))
    moved = reroot_bundle(bundles[0], Cell(5, 5), dims, np.random.default_rng(1))
    assert moved.start == Cell(5, 5) and moved.unit is Unit.JUNCTION
    assert reroot_bundle(bundles[0], Cell(0, 0), dims, np.random.default_rng(1)) is None
