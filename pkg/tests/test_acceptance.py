"""
Exit criteria. Each test records one PASS/FAIL line; the lines are printed in
the pytest terminal summary and also when this file is run as a script:

    python tests/test_acceptance.py
"""

from __future__ import annotations

import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
sys.setrecursionlimit(10_000)

from oracles import exhaustive_min_cost, is_simple_path  # noqa: E402

from cavegen.analysis import batch_report, iou  # noqa: E402
from cavegen.assembly import builtin_catalog, dumps_obj, merge_meshes  # noqa: E402
from cavegen.cli import main  # noqa: E402
from cavegen.config import resolve  # noqa: E402
from cavegen.grid import DIR_BY_NAME, Cell, GridDims, TopometricType, mask_of, neighbor_mask, rotate_mask  # noqa: E402
from cavegen.pathgen import RouteDescriptor, build_cost_matrix, discretize_guide, path_cost, shortest_path  # noqa: E402
from cavegen.pipeline import OCCUPANCY_FILE, build_world, generate  # noqa: E402
from cavegen.rng import world_seed  # noqa: E402

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}
DESCRIPTORS = ("linear", "parabolic", "sine")
MASTER_SEED = 42


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


# -- 1 structural guarantee ----------------------------------------------------


def test_c01_requested_units_present():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    short = []
    for i in range(100):
        cfg = {"rows": 20, "cols": 20, "levels": int(rng.integers(1, 3)), "descriptor": DESCRIPTORS[i % 3]}
        j, lp, it = (int(v) for v in rng.integers(0, 3, size=3))
        if j + lp + it == 0:
            j = 1
        cfg.update(junctions=j, loops=lp, intersections=it)
        r = build_world(resolve(cfg, world_seed(MASTER_SEED, i)))
        for k, (req, got) in enumerate(zip(r.spec.requests, r.counts)):
            if (
                got[TopometricType.JUNCTION] < req.junctions
                or got.loops < req.loops
                or got[TopometricType.INTERSECTION] < req.intersections
            ):
                short.append((i, k))
    dt = time.perf_counter() - start
    record(1, not short and dt < 30, f"100 specs on 20x20, {len(short)} levels short of request, {dt:.1f} s")


# -- 2 path correctness -----------------------------------------------------------


def test_c02_dijkstra_matches_exhaustive_search():
    rng = np.random.default_rng(1002)
    dims = GridDims(1, 15, 15)
    start = time.perf_counter()
    bad = 0
    for i in range(100):
        c = Cell(int(rng.integers(15)), int(rng.integers(15)))
        o = c
        while o == c:
            o = Cell(int(rng.integers(15)), int(rng.integers(15)))
        cost = build_cost_matrix(discretize_guide(c, o, RouteDescriptor(i % 3), dims), dims)
        path = shortest_path(cost, c, o)
        if not is_simple_path(path, c, o) or abs(path_cost(cost, path) - exhaustive_min_cost(cost, c, o)) > 1e-9:
            bad += 1
    dt = time.perf_counter() - start
    record(2, bad == 0 and dt < 60, f"100 triples on 15x15, {bad} mismatches, {dt:.1f} s")


# -- 3 similarity algebra ---------------------------------------------------------


def test_c03_similarity_algebra():
    rng = np.random.default_rng(1003)
    start = time.perf_counter()
    worst = 0.0
    ok = True
    for _ in range(50):
        shape = tuple(int(v) for v in rng.integers(1, 20, size=2))
        m = rng.integers(0, 2, size=shape)
        m.flat[int(rng.integers(m.size))] = 1
        other = rng.integers(0, 2, size=shape)
        worst = max(worst, abs(iou(m, m) - 0.5))
        s = iou(m, other)
        ok &= s == iou(other, m) and 0.0 <= s <= 0.5
    dt = time.perf_counter() - start
    record(3, ok and worst <= 1e-12 and dt < 1, f"50 matrices, max |iou(M,M)-0.5| = {worst:.1e}, {dt:.2f} s")


# -- 4-6 desk-scale dataset -------------------------------------------------------


@lru_cache(maxsize=1)
def desk_dataset():
    """20 single-level 30x30 worlds per descriptor, same seeds and units across groups."""
    grids, labels, ids = [], [], []
    start = time.perf_counter()
    for name in DESCRIPTORS:
        for i in range(20):
            cfg = {"rows": 30, "cols": 30, "levels": 1, "descriptor": name, "junctions": 1, "intersections": 1, "loops": 0}
            grids.append(build_world(resolve(cfg, world_seed(MASTER_SEED, i))).grid)
            labels.append(name)
            ids.append(f"{name}/{i:02d}")
    report = batch_report(grids, labels, ids)
    return report, time.perf_counter() - start


def test_c04_parabolic_most_self_similar():
    report, dt = desk_dataset()
    means = {n: report.groups[n].mean_similarity for n in DESCRIPTORS}
    ok = means["parabolic"] > means["linear"] and means["parabolic"] > means["sine"] and dt < 300
    detail = ", ".join(f"{n} {v:.4f}" for n, v in means.items())
    record(4, ok, f"mean pairwise similarity: {detail} ({dt:.1f} s)")


def test_c05_low_symmetry_and_linear_highest():
    report, _ = desk_dataset()
    peak = max(max(report.normalized_symmetry(w)) for w in report.symmetry)
    means = {n: report.mean_normalized_symmetry(n) for n in DESCRIPTORS}
    below = peak < 0.25
    ordered = means["linear"] > means["parabolic"] and means["linear"] > means["sine"]
    detail = ", ".join(f"{n} {v:.3f}" for n, v in means.items())
    record(5, below and ordered, f"max normalized symmetry {peak:.3f} (limit 0.25); group means: {detail}")


def test_c06_modal_tile_types():
    report, _ = desk_dataset()
    modal = {n: max(report.groups[n].appearance.items(), key=lambda kv: kv[1])[0] for n in DESCRIPTORS}
    ok = modal["linear"] is TopometricType.PATHWAY and modal["sine"] is TopometricType.CORNER
    detail = ", ".join(f"{n} {t.value}" for n, t in modal.items())
    record(6, ok, f"modal type: {detail} (want linear pathway, sine corner)")


# -- 7 assembly congruence --------------------------------------------------------


def test_c07_ports_match_occupancy():
    catalog = builtin_catalog()
    names = ("natural-cave", "operational-mine", "lava-tube")
    start = time.perf_counter()
    bad = 0
    for i in range(50):
        r = build_world(resolve({"preset": names[i % 3]}, world_seed(MASTER_SEED, i)), catalog)
        ok = len(r.manifest.placements) == int(r.grid.cells.sum()) + len(r.grid.shafts)
        for p in r.manifest.placements:
            if p.kind == "shaft":
                continue
            ports = mask_of(DIR_BY_NAME[d] for d in catalog.get(p.asset_id).port_edges)
            ok &= rotate_mask(ports, p.rotation) == neighbor_mask(r.grid, p.level, p.cell)
        bad += not ok
    dt = time.perf_counter() - start
    record(7, bad == 0 and dt < 60, f"50 worlds, {bad} with mismatched ports or counts, {dt:.1f} s")


# -- 8 determinism ----------------------------------------------------------------


def _tree(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_c08_batch_is_reproducible(tmp_path):
    start = time.perf_counter()
    codes = []
    for d in ("a", "b"):
        args = ["batch", "--preset", "natural-cave", "--count", "5", "--seed", "42", "--no-mesh", "--out", str(tmp_path / d)]
        codes.append(main(args))
    a, b = _tree(tmp_path / "a"), _tree(tmp_path / "b")
    dt = time.perf_counter() - start
    worlds = sum(1 for k in a if k.endswith(OCCUPANCY_FILE))
    ok = codes == [0, 0] and a == b and worlds == 5 and dt < 30
    record(8, ok, f"{len(a)} files per run, identical={a == b}, {dt:.1f} s")


# -- 9-10 performance and size ----------------------------------------------------


def _big_spec():
    return resolve({"rows": 50, "cols": 50, "levels": 3, "junctions": 2, "intersections": 2, "loops": [0, 1]}, MASTER_SEED)


def test_c09_desk_scale_performance(tmp_path):
    spec = _big_spec()
    catalog = builtin_catalog(spec.tunnel_width, spec.tunnel_height)
    t0 = time.perf_counter()
    result = generate(spec, tmp_path, ("occupancy", "manifest"), catalog=catalog)
    t1 = time.perf_counter()
    mesh = merge_meshes(result.manifest, catalog)
    (tmp_path / "world.obj").write_text(dumps_obj(mesh))
    t2 = time.perf_counter()
    ok = t1 - t0 < 2 and t2 - t1 < 20
    record(9, ok, f"50x50x3: occupancy+manifest {t1 - t0:.2f} s (limit 2), merged mesh {t2 - t1:.2f} s (limit 20), {len(mesh.faces)} faces")


def test_c10_occupancy_file_is_small(tmp_path):
    generate(_big_spec(), tmp_path, ("occupancy",))
    size = (tmp_path / OCCUPANCY_FILE).stat().st_size
    record(10, size <= 16 * 1024, f"50x50x3 occupancy file {size} bytes (limit {16 * 1024})")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
