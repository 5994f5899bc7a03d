"""
Topological variability metrics over occupancy grids.

The similarity score is intersection over *sum* of two binary matrices, so
two identical non-empty matrices score 0.5, not 1. Symmetry scores compare a
level with its own mirror images and rotations using the same score.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyWorld, GridError
from .grid import CLASSIFICATION, TOPO_ORDER, OccupancyGrid, TopometricType, mask_array

MAX_SIMILARITY = 0.5


def iou(m1: np.ndarray, m2: np.ndarray) -> float:
    """Sum of the elementwise product over the sum of both matrices; 0 when both are empty."""
    m1, m2 = np.asarray(m1, dtype=np.float64), np.asarray(m2, dtype=np.float64)
    if m1.shape != m2.shape:
        raise GridError(f"shape mismatch {m1.shape} vs {m2.shape}")
    denom = m1.sum() + m2.sum()
    if denom == 0:
        return 0.0
    return float((m1 * m2).sum() / denom)


similarity = iou


def mirror_h(m: np.ndarray) -> np.ndarray:
    return np.asarray(m)[:, ::-1]


def mirror_v(m: np.ndarray) -> np.ndarray:
    return np.asarray(m)[::-1, :]


def pad_square(m: np.ndarray) -> np.ndarray:
    """Zero-pad to a centred square (odd remainder goes bottom/right)."""
    m = np.asarray(m)
    rows, cols = m.shape
    size = max(rows, cols)
    top, left = (size - rows) // 2, (size - cols) // 2
    return np.pad(m, ((top, size - rows - top), (left, size - cols - left)))


def rotate90(m: np.ndarray, k: int = 1) -> np.ndarray:
    """Rotate clockwise by ``k`` quarter turns; non-square input is padded square first."""
    return np.rot90(pad_square(m), -k)


def symmetry_scores(m: np.ndarray) -> tuple[float, float, float]:
    """(horizontal, vertical, rotational) self-similarity of one level."""
    m = np.asarray(m)
    sq = pad_square(m)
    rot = float(np.mean([iou(sq, rotate90(sq, k)) for k in (1, 2, 3)]))
    return iou(m, mirror_h(m)), iou(m, mirror_v(m)), rot


def type_histogram(grid: OccupancyGrid) -> dict[TopometricType, int]:
    hist = {t: 0 for t in TOPO_ORDER}
    for level in grid.cells:
        masks = mask_array(level)
        for mask, n in zip(*np.unique(masks[level.astype(bool)], return_counts=True)):
            if mask:
                hist[CLASSIFICATION[int(mask)][0]] += int(n)
    return hist


def appearance_distribution(grid: OccupancyGrid) -> dict[TopometricType, float]:
    hist = type_histogram(grid)
    total = sum(hist.values())
    if total == 0:
        raise EmptyWorld("no classifiable cells in grid")
    return {t: n / total for t, n in hist.items()}


def _common_frame(grids: Sequence[OccupancyGrid]) -> tuple[int, int]:
    return max(g.dims.rows for g in grids), max(g.dims.cols for g in grids)


def _level(grid: OccupancyGrid, k: int, frame: tuple[int, int]) -> np.ndarray:
    lvl = grid.cells[k]
    return np.pad(lvl, ((0, frame[0] - lvl.shape[0]), (0, frame[1] - lvl.shape[1])))


def world_similarity(a: OccupancyGrid, b: OccupancyGrid, frame: tuple[int, int] | None = None) -> float:
    """Mean of level-aligned scores over the levels both worlds share."""
    frame = frame or _common_frame([a, b])
    shared = min(a.dims.levels, b.dims.levels)
    return float(np.mean([iou(_level(a, k, frame), _level(b, k, frame)) for k in range(shared)]))


def world_symmetry(grid: OccupancyGrid) -> tuple[float, float, float]:
    scores = np.array([symmetry_scores(level) for level in grid.cells])
    return tuple(float(v) for v in scores.mean(axis=0))


@dataclass
class GroupReport:
    label: str
    ids: list[str]
    similarity: np.ndarray
    appearance: dict[TopometricType, float]

    @property
    def mean_similarity(self) -> float:
        """Mean over distinct pairs (off-diagonal)."""
        n = len(self.ids)
        if n < 2:
            return float("nan")
        off = self.similarity[~np.eye(n, dtype=bool)]
        return float(off.mean())


@dataclass
class AnalysisReport:
    groups: dict[str, GroupReport]
    symmetry: dict[str, tuple[float, float, float]]
    labels: dict[str, str] = field(default_factory=dict)

    def normalized_symmetry(self, world_id: str) -> tuple[float, float, float]:
        return tuple(v / MAX_SIMILARITY for v in self.symmetry[world_id])

    def mean_normalized_symmetry(self, label: str) -> float:
        ids = self.groups[label].ids
        return float(np.mean([self.normalized_symmetry(i) for i in ids]))


def batch_report(
    grids: Sequence[OccupancyGrid], labels: Sequence[str], ids: Sequence[str] | None = None
) -> AnalysisReport:
    """Pairwise similarity per group, per-world symmetry and per-group appearance."""
    if len(grids) < 2:
        raise GridError("batch_report needs at least two grids")
    if len(labels) != len(grids):
        raise GridError("one label per grid required")
    ids = list(ids) if ids is not None else [f"w{i:03d}" for i in range(len(grids))]
    frame = _common_frame(grids)
    groups: dict[str, GroupReport] = {}
    for label in dict.fromkeys(labels):
        idx = [i for i, lab in enumerate(labels) if lab == label]
        n = len(idx)
        sim = np.zeros((n, n))
        for a, b in itertools.combinations_with_replacement(range(n), 2):
            sim[a, b] = sim[b, a] = world_similarity(grids[idx[a]], grids[idx[b]], frame)
        hist = {t: 0 for t in TOPO_ORDER}
        for i in idx:
            for t, c in type_histogram(grids[i]).items():
                hist[t] += c
        total = sum(hist.values()) or 1
        groups[label] = GroupReport(label, [ids[i] for i in idx], sim, {t: c / total for t, c in hist.items()})
    symmetry = {ids[i]: world_symmetry(g) for i, g in enumerate(grids)}
    return AnalysisReport(groups, symmetry, dict(zip(ids, labels)))


def similarity_csv(group: GroupReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["world", *group.ids])
    for wid, row in zip(group.ids, group.similarity):
        w.writerow([wid, *(f"{v:.6f}" for v in row)])
    return buf.getvalue()


def symmetry_csv(report: AnalysisReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["world", "group", "horizontal", "vertical", "rotational"])
    for wid, scores in report.symmetry.items():
        w.writerow([wid, report.labels.get(wid, ""), *(f"{v:.6f}" for v in scores)])
    return buf.getvalue()


def appearance_csv(report: AnalysisReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", *(t.value for t in TOPO_ORDER)])
    for label, g in report.groups.items():
        w.writerow([label, *(f"{g.appearance[t]:.6f}" for t in TOPO_ORDER)])
    return buf.getvalue()


def summary_text(report: AnalysisReport) -> str:
    lines = ["group\tworlds\tmean_similarity\tmean_sym_h\tmean_sym_v\tmean_sym_r\tmodal_type"]
    for label, g in report.groups.items():
        sym = np.array([report.symmetry[i] for i in g.ids])
        modal = max(TOPO_ORDER, key=lambda t: g.appearance[t])
        lines.append(
            f"{label}\t{len(g.ids)}\t{g.mean_similarity:.6f}\t"
            + "\t".join(f"{v:.6f}" for v in sym.mean(axis=0))
            + f"\t{modal.value}"
        )
    return "\n".join(lines) + "\n"
