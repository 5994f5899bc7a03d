import math
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import ndimage

from cavegen.errors import DegeneratePair
from cavegen.grid import Cell, GridDims, OccupancyGrid, TopometricType, count_units
from cavegen.pathgen import (
    DEFAULT_PENALTY,
    RouteDescriptor,
    build_cost_matrix,
    carve,
    discretize_guide,
    generate_level,
    generate_world,
    join_components,
    path_cost,
    raster_line,
    segment_samples,
    shortest_path,
)
from cavegen.structural import LevelRequest, distribute

sys.setrecursionlimit(10_000)
from oracles import bellman_ford, exhaustive_min_cost, is_simple_path  # noqa: E402

LINEAR = RouteDescriptor.named("linear")
PARABOLIC = RouteDescriptor.named("parabolic")
SINE = RouteDescriptor.named("sine")


def test_descriptor_names_and_validation():
    assert (LINEAR.harmonics, PARABOLIC.harmonics, SINE.harmonics) == (0, 1, 2)
    with pytest.raises(ValueError):
        RouteDescriptor(3)
    with pytest.raises(ValueError):
        RouteDescriptor.named("square")
    with pytest.raises(ValueError):
        RouteDescriptor(1, amplitude_fraction=0)


def test_sample_count():
    ps = segment_samples(Cell(0, 0), Cell(3, 4), 2.0)
    assert len(ps) == 11 and ps[0] == 0 and ps[-1] == 1
    with pytest.raises(DegeneratePair):
        segment_samples(Cell(1, 1), Cell(1, 1), 2.0)


def test_sine_guide_swings_to_both_sides():
    dims = GridDims(1, 21, 21)
    c, o = Cell(0, 10), Cell(20, 10)
    guide = discretize_guide(c, o, SINE, dims)
    # A = 0.25 * 21 = 5.25, normal (0, 1), S = 40: by hand
    # p = 0.25 -> (5, floor(10 + 5.25)) ; p = 0.75 -> (15, floor(10 - 5.25))
    assert Cell(5, 15) in guide and Cell(15, 4) in guide
    assert guide[0] == c and guide[-1] == o


def test_linear_guide_is_the_segment():
    dims = GridDims(1, 5, 5)
    assert discretize_guide(Cell(0, 2), Cell(4, 2), LINEAR, dims) == [Cell(x, 2) for x in range(5)]


def test_guide_cells_in_bounds():
    rng = np.random.default_rng(99)
    for _ in range(10_000):
        rows, cols = (int(v) for v in rng.integers(3, 40, size=2))
        dims = GridDims(1, rows, cols)
        c = Cell(int(rng.integers(cols)), int(rng.integers(rows)))
        o = Cell(int(rng.integers(cols)), int(rng.integers(rows)))
        if c == o:
            continue
        d = RouteDescriptor(int(rng.integers(3)), float(rng.uniform(0.05, 0.5)), float(rng.uniform(1, 3)))
        assert all(dims.contains(p) for p in discretize_guide(c, o, d, dims))


def test_straight_guide_path():
    dims = GridDims(1, 5, 5)
    guide = discretize_guide(Cell(0, 2), Cell(4, 2), LINEAR, dims)
    cost = build_cost_matrix(guide, dims)
    path = shortest_path(cost, Cell(0, 2), Cell(4, 2))
    assert path == guide
    assert path_cost(cost, path) == 4


def test_uniform_cost_gives_monotone_staircase():
    cost = np.ones((7, 9))
    c, o = Cell(1, 5), Cell(7, 1)
    path = shortest_path(cost, c, o)
    assert len(path) - 1 == abs(o.x - c.x) + abs(o.y - c.y)
    xs, ys = [p.x for p in path], [p.y for p in path]
    assert xs == sorted(xs) and ys == sorted(ys, reverse=True)


def test_cost_matrix_values():
    dims = GridDims(1, 4, 4)
    cost = build_cost_matrix([Cell(0, 0), Cell(1, 0)], dims, 50.0, reserved=[Cell(3, 3)])
    assert cost[0, 0] == cost[0, 1] == 1.0
    assert cost[2, 2] == 50.0
    assert cost[3, 3] > 50.0
    with pytest.raises(ValueError):
        build_cost_matrix([Cell(0, 0)], dims, math.inf)


def _random_cost(rng, size):
    c = Cell(int(rng.integers(size)), int(rng.integers(size)))
    o = c
    while o == c:
        o = Cell(int(rng.integers(size)), int(rng.integers(size)))
    d = RouteDescriptor(int(rng.integers(3)))
    guide = discretize_guide(c, o, d, GridDims(1, size, size))
    return build_cost_matrix(guide, GridDims(1, size, size)), c, o


def test_dijkstra_matches_exhaustive_search_5x5():
    rng = np.random.default_rng(5)
    for _ in range(100):
        cost, c, o = _random_cost(rng, 5)
        path = shortest_path(cost, c, o)
        assert is_simple_path(path, c, o)
        assert path_cost(cost, path) == pytest.approx(exhaustive_min_cost(cost, c, o))


@given(st.integers(0, 2**32), st.integers(3, 12), st.integers(3, 12))
def test_dijkstra_matches_bellman_ford(seed, rows, cols):
    rng = np.random.default_rng(seed)
    cost = rng.choice([1.0, 2.0, 7.5, 100.0], size=(rows, cols))
    c = Cell(int(rng.integers(cols)), int(rng.integers(rows)))
    o = Cell(int(rng.integers(cols)), int(rng.integers(rows)))
    path = shortest_path(cost, c, o)
    assert is_simple_path(path, c, o) or (c == o and path == [c])
    assert path_cost(cost, path) == pytest.approx(bellman_ford(cost, c)[o.y, o.x])


def test_dijkstra_is_deterministic_under_ties():
    cost = np.ones((6, 6))
    assert shortest_path(cost, Cell(0, 0), Cell(5, 5)) == shortest_path(cost.copy(), Cell(0, 0), Cell(5, 5))


def test_path_no_worse_than_connected_guide():
    dims = GridDims(1, 25, 25)
    rng = np.random.default_rng(1)
    for _ in range(50):
        c, o = (Cell(int(rng.integers(25)), int(rng.integers(25))) for _ in range(2))
        if c == o:
            continue
        guide = discretize_guide(c, o, SINE, dims, connect=True)
        cost = build_cost_matrix(guide, dims)
        assert path_cost(cost, shortest_path(cost, c, o)) <= len(guide) - 1


def test_raster_line_is_4_connected():
    for a, b in [((0, 0), (5, 3)), ((4, 4), (0, 0)), ((2, 7), (2, 1)), ((0, 3), (6, 3))]:
        line = raster_line(Cell(*a), Cell(*b))
        assert is_simple_path(line, a, b)
        assert len(line) == abs(a[0] - b[0]) + abs(a[1] - b[1]) + 1


def test_default_penalty_keeps_paths_on_the_guide():
    # tuning oracle: mean taxicab distance from carved cells to the guide, 20 pairs on 30x30
    dims = GridDims(1, 30, 30)
    rng = np.random.default_rng(20)
    pairs = []
    while len(pairs) < 20:
        c, o = (Cell(int(rng.integers(30)), int(rng.integers(30))) for _ in range(2))
        if c != o:
            pairs.append((c, o))
    for d in (LINEAR, PARABOLIC, SINE):
        devs = []
        for c, o in pairs:
            guide = discretize_guide(c, o, d, dims)
            path = shortest_path(build_cost_matrix(guide, dims, DEFAULT_PENALTY), c, o)
            devs += [min(abs(p.x - g.x) + abs(p.y - g.y) for g in guide) for p in path]
        assert np.mean(devs) <= 1.0, d.name


def test_axis_aligned_linear_carve_is_straight():
    g = OccupancyGrid.empty(1, 9, 9)
    path = carve(g, 0, Cell(1, 4), Cell(7, 4), LINEAR)
    assert path == [Cell(x, 4) for x in range(1, 8)]
    assert g.cells[0].sum() == 7


def test_single_junction_bundle_survives():
    for seed in range(30):
        dims = GridDims(1, 14, 14)
        rng = np.random.default_rng(seed)
        (bundles,) = distribute(dims, [LevelRequest(junctions=1)], rng)
        g = OccupancyGrid(dims)
        generate_level(g, 0, bundles, PARABOLIC)
        assert count_units(g, 0)[TopometricType.JUNCTION] >= 1
        assert g.cells.sum() >= len(bundles[0].cells)


def test_zero_bundles_leave_level_unchanged():
    g = OccupancyGrid.empty(1, 6, 6)
    generate_level(g, 0, [], SINE)
    assert g.cells.sum() == 0


def test_loop_and_two_intersections_scenario():
    for seed in range(40):
        dims = GridDims(1, 20, 20)
        rng = np.random.default_rng(seed)
        bundles = distribute(dims, [LevelRequest(loops=1, intersections=2)], rng)
        g = OccupancyGrid(dims)
        generate_world(g, bundles, PARABOLIC, rng)
        counts = count_units(g, 0)
        assert ndimage.label(g.cells[0])[1] == 1
        assert counts.loops >= 1
        assert counts[TopometricType.INTERSECTION] + counts[TopometricType.JUNCTION] >= 2


def test_join_components_links_islands():
    g = OccupancyGrid.from_rows(["##....", "......", "....##", "......"])
    paths = join_components(g, 0)
    assert len(paths) == 1
    assert ndimage.label(g.cells[0])[1] == 1
    # closest pair (1,0)-(4,2) is 5 steps apart: 4 new cells
    assert g.cells.sum() == 4 + 4


@pytest.mark.parametrize("levels", [1, 3])
def test_shafts_link_levels(levels):
    for seed in range(25):
        dims = GridDims(levels, 16, 16)
        rng = np.random.default_rng(seed)
        bundles = distribute(dims, [LevelRequest(1, 0, 1)] * levels, rng)
        g = OccupancyGrid(dims)
        generate_world(g, bundles, SINE, rng)
        assert len(g.shafts) == levels - 1
        for k, c in g.shafts:
            assert g.occupied(k, c) and g.occupied(k + 1, c)
