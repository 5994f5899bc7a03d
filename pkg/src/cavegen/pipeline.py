"""
End-to-end generation: spec -> occupancy -> manifest -> meshes -> world file.

Each world uses independent random streams per phase ("structure", "paths",
"assets", "obstacles"), all derived from the world seed, so adding draws to
one phase never shifts another.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .assembly import (
    associate,
    builtin_catalog,
    dumps_manifest,
    dumps_obj,
    emit_world,
    load_catalog,
    merge_meshes,
    place_obstacles,
    scale_world,
)
from .assembly.catalog import TileCatalog
from .assembly.world import WorldManifest
from .config import EnvironmentSpec, resolve
from .errors import CaveGenError, EmptyWorld
from .grid import OccupancyGrid, TopometricType, UnitCounts, count_units, dumps_occupancy
from .io import atomic_write
from .pathgen import generate_world
from .rng import stream, world_seed
from .structural import ConstraintBundle, distribute

log = logging.getLogger(__name__)

OUTPUT_FORMATS = ("occupancy", "manifest", "obj", "sdf")
OCCUPANCY_FILE = "occupancy.json"
MANIFEST_FILE = "manifest.json"
SPEC_FILE = "spec.json"
MESH_FILE = "world.obj"
WORLD_FILE = "world.sdf"
INDEX_FILE = "index.json"


@dataclass
class WorldResult:
    spec: EnvironmentSpec
    grid: OccupancyGrid
    bundles: list[list[ConstraintBundle]]
    manifest: WorldManifest
    counts: list[UnitCounts]
    files: list[Path] = field(default_factory=list)

    def summary(self) -> dict:
        levels = []
        for req, got in zip(self.spec.requests, self.counts):
            levels.append(
                {
                    "requested": {"junctions": req.junctions, "loops": req.loops, "intersections": req.intersections, "fill": req.fill},
                    "found": {"junctions": got.types[TopometricType.JUNCTION], "loops": got.loops, "intersections": got.types[TopometricType.INTERSECTION]},
                }
            )
        return {
            "seed": self.spec.seed,
            "preset": self.spec.name,
            "dims": [self.grid.dims.levels, self.grid.dims.rows, self.grid.dims.cols],
            "occupied": int(self.grid.cells.sum()),
            "placements": len(self.manifest.placements),
            "shafts": len(self.grid.shafts),
            "obstacles": len(self.manifest.obstacles),
            "levels": levels,
        }


def build_catalog(spec: EnvironmentSpec) -> TileCatalog:
    if spec.catalog:
        return load_catalog(Path(spec.catalog), fallback=True)
    return builtin_catalog(spec.tunnel_width, spec.tunnel_height)


def build_world(spec: EnvironmentSpec, catalog: TileCatalog | None = None) -> WorldResult:
    """Run every in-memory stage; nothing is written."""
    seed = spec.seed
    bundles = distribute(spec.dims, spec.requests, stream(seed, "structure"))
    if not any(bundles):
        raise EmptyWorld("spec requests no structural units")
    grid = OccupancyGrid.empty(spec.dims.levels, spec.dims.rows, spec.dims.cols, seed=seed)
    generate_world(grid, bundles, spec.descriptor, stream(seed, "paths"), spec.penalty)
    catalog = catalog or build_catalog(spec)
    first = next(b for level in bundles for b in level)
    manifest = associate(grid, catalog, stream(seed, "assets"), start=(first.requirement.level, first.objectives[0]), preset=spec.name)
    place_obstacles(manifest, spec.obstacle_density, stream(seed, "obstacles"), catalog)
    scale_world(manifest, spec.min_length, spec.max_width)
    counts = [count_units(grid, k) for k in range(spec.dims.levels)]
    return WorldResult(spec, grid, bundles, manifest, counts)


def generate(
    spec: EnvironmentSpec,
    out_dir,
    formats: tuple[str, ...] = OUTPUT_FORMATS,
    split: bool = False,
    catalog: TileCatalog | None = None,
) -> WorldResult:
    """Build a world and write the requested outputs into ``out_dir``."""
    unknown = set(formats) - set(OUTPUT_FORMATS)
    if unknown:
        raise ValueError(f"unknown output format(s): {sorted(unknown)}")
    out = Path(out_dir)
    catalog = catalog or build_catalog(spec)
    result = build_world(spec, catalog)
    files = [atomic_write(out / SPEC_FILE, json.dumps(spec.to_dict(), indent=1) + "\n")]
    if "occupancy" in formats:
        files.append(atomic_write(out / OCCUPANCY_FILE, dumps_occupancy(result.grid)))
    if "manifest" in formats:
        files.append(atomic_write(out / MANIFEST_FILE, dumps_manifest(result.manifest)))
    if "obj" in formats or "sdf" in formats:
        files += _write_meshes(result.manifest, catalog, out, split, "sdf" in formats)
    result.files = files
    return result


def _write_meshes(manifest: WorldManifest, catalog: TileCatalog, out: Path, split: bool, sdf: bool) -> list[Path]:
    files: list[Path] = []
    paths: dict[str, str] = {}
    if split:
        for aid in sorted({p.asset_id for p in manifest.placements}):
            rel = f"assets/{aid}.obj"
            files.append(atomic_write(out / rel, dumps_obj(catalog.get(aid).mesh, aid)))
            paths[aid] = rel
    else:
        mesh = merge_meshes(manifest, catalog)
        files.append(atomic_write(out / MESH_FILE, dumps_obj(mesh, f"{len(manifest.placements)} tiles")))
        paths["world"] = MESH_FILE
    for aid in sorted({o.asset_id for o in manifest.obstacles}):
        rel = f"assets/{aid}.obj"
        if aid not in paths:
            files.append(atomic_write(out / rel, dumps_obj(catalog.get(aid).mesh, aid)))
            paths[aid] = rel
    if sdf:
        textures = {}
        for a in catalog.assets():
            for slot, tex in a.texture_slots.items():
                textures.setdefault(slot, tex)
        files.append(atomic_write(out / WORLD_FILE, emit_world(manifest, paths, textures, split=split)))
    return files


def _batch_one(args) -> dict:
    config, index, seed, world_dir, formats, split = args
    entry = {"index": index, "seed": seed, "dir": world_dir.name}
    try:
        spec = resolve(config, seed)
        result = generate(spec, world_dir, formats, split)
        entry.update(status="ok", **{k: v for k, v in result.summary().items() if k not in ("seed",)})
    except CaveGenError as exc:
        entry.update(status="failed", error=f"{type(exc).__name__}: {exc}")
    return entry


def batch(
    config: dict,
    count: int,
    master_seed: int,
    out_dir,
    parallelism: int = 1,
    formats: tuple[str, ...] = OUTPUT_FORMATS,
    split: bool = False,
) -> dict:
    """Generate ``count`` worlds under ``out_dir/<preset>/<index>/`` plus an index file.

    Failures are recorded in the index and do not stop the batch.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    preset = config.get("preset") or "custom"
    root = Path(out_dir) / preset
    jobs = [
        (config, i, world_seed(master_seed, i), root / f"{i:04d}", tuple(formats), split)
        for i in range(count)
    ]
    if parallelism > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=min(parallelism, count, os.cpu_count() or 1)) as pool:
            entries = list(pool.map(_batch_one, jobs))
    else:
        entries = [_batch_one(j) for j in jobs]
    index = {
        "preset": preset,
        "master_seed": master_seed,
        "count": count,
        "failed": sum(e["status"] != "ok" for e in entries),
        "worlds": entries,
    }
    atomic_write(root / INDEX_FILE, json.dumps(index, indent=1) + "\n")
    for e in entries:
        if e["status"] != "ok":
            log.warning("world %s (seed %s) failed: %s", e["index"], e["seed"], e["error"])
    return index
