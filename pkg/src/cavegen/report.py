"""Dataset analysis: collect occupancy files, score them and write CSV/SVG/text reports."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .analysis import AnalysisReport, appearance_csv, batch_report, similarity_csv, summary_text, symmetry_csv
from .errors import CaveGenError
from .grid import OccupancyGrid, load_occupancy
from .io import atomic_write
from .pipeline import MANIFEST_FILE, OCCUPANCY_FILE
from .plotting import appearance_svg, heatmap_svg

log = logging.getLogger(__name__)


@dataclass
class Collected:
    grids: list[OccupancyGrid]
    labels: list[str]
    ids: list[str]
    skipped: list[tuple[Path, str]]


def find_occupancy_files(inputs: Iterable) -> list[Path]:
    files: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files += sorted(p.rglob(OCCUPANCY_FILE))
        else:
            files.append(p)
    return files


def _label(path: Path, group_by: str) -> str:
    if group_by == "preset":
        manifest = path.with_name(MANIFEST_FILE)
        if manifest.exists():
            try:
                return json.loads(manifest.read_text(encoding="utf-8")).get("preset", "custom")
            except (OSError, json.JSONDecodeError):
                pass
    # batch layout: <group>/<index>/occupancy.json; loose files share one group
    if path.name == OCCUPANCY_FILE:
        return path.parent.parent.name or "all"
    return "all"


def collect(inputs: Iterable, group_by: str = "preset") -> Collected:
    grids, labels, ids, skipped = [], [], [], []
    for f in find_occupancy_files(inputs):
        try:
            grids.append(load_occupancy(f))
        except (OSError, CaveGenError) as exc:
            log.warning("skipping %s: %s", f, exc)
            skipped.append((f, str(exc)))
            continue
        labels.append(_label(f, group_by))
        ids.append(f"{f.parent.parent.name}/{f.parent.name}" if f.name == OCCUPANCY_FILE else f.stem)
    # ids must be unique for the report tables
    seen: dict[str, int] = {}
    for i, wid in enumerate(ids):
        if wid in seen:
            seen[wid] += 1
            ids[i] = f"{wid}#{seen[wid]}"
        else:
            seen[wid] = 0
    return Collected(grids, labels, ids, skipped)


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label) or "group"


def write_report(report: AnalysisReport, out_dir) -> list[Path]:
    out = Path(out_dir)
    files = []
    for label, group in report.groups.items():
        slug = _slug(label)
        files.append(atomic_write(out / f"similarity_{slug}.csv", similarity_csv(group)))
        files.append(
            atomic_write(
                out / f"similarity_{slug}.svg",
                heatmap_svg(group.similarity, group.ids, f"{label}: mean {group.mean_similarity:.3f}"),
            )
        )
    files.append(atomic_write(out / "symmetry.csv", symmetry_csv(report)))
    files.append(atomic_write(out / "appearance.csv", appearance_csv(report)))
    files.append(atomic_write(out / "appearance.svg", appearance_svg({k: g.appearance for k, g in report.groups.items()})))
    files.append(atomic_write(out / "summary.txt", summary_text(report)))
    return files


def analyze(inputs: Iterable, out_dir, group_by: str = "preset") -> tuple[AnalysisReport, Collected]:
    got = collect(inputs, group_by)
    if len(got.grids) < 2:
        raise ValueError(f"analysis needs at least two readable worlds, found {len(got.grids)}")
    report = batch_report(got.grids, got.labels, got.ids)
    write_report(report, out_dir)
    return report, got
