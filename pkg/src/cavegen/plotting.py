"""
SVG figures: similarity heatmaps, appearance bars and level maps.

Figures are built with the object-oriented matplotlib API (no pyplot state)
and written with a fixed hash salt and no date stamp, so identical inputs give
identical bytes.
"""

from __future__ import annotations

import io
from typing import Mapping, Sequence

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.colors import ListedColormap
from matplotlib.figure import Figure

from .grid import TOPO_ORDER, CLASSIFICATION, OccupancyGrid, TopometricType, mask_array

TYPE_COLORS = {
    None: "#ffffff",
    TopometricType.DEADEND: "#d62728",
    TopometricType.PATHWAY: "#1f77b4",
    TopometricType.CORNER: "#2ca02c",
    TopometricType.JUNCTION: "#ff7f0e",
    TopometricType.INTERSECTION: "#9467bd",
}


def _svg(fig: Figure) -> str:
    FigureCanvasSVG(fig)
    buf = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": "cavegen", "svg.fonttype": "none"}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def heatmap_svg(matrix: np.ndarray, labels: Sequence[str], title: str, vmax: float = 0.5) -> str:
    n = len(labels)
    size = max(3.0, 0.3 * n + 2.0)
    fig = Figure(figsize=(size + 1.0, size))
    ax = fig.add_subplot()
    im = ax.imshow(np.asarray(matrix), vmin=0.0, vmax=vmax, cmap="viridis")
    ax.set_xticks(range(n), labels, rotation=90, fontsize=6)
    ax.set_yticks(range(n), labels, fontsize=6)
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="similarity")
    fig.tight_layout()
    return _svg(fig)


def appearance_svg(groups: Mapping[str, Mapping[TopometricType, float]]) -> str:
    fig = Figure(figsize=(6, 3.5))
    ax = fig.add_subplot()
    names = list(groups)
    width = 0.8 / max(1, len(names))
    x = np.arange(len(TOPO_ORDER))
    for i, name in enumerate(names):
        ax.bar(x + i * width, [groups[name][t] for t in TOPO_ORDER], width, label=name)
    ax.set_xticks(x + width * (len(names) - 1) / 2, [t.value for t in TOPO_ORDER])
    ax.set_ylabel("fraction of tiles")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _svg(fig)


def level_codes(grid: OccupancyGrid, level: int) -> np.ndarray:
    """0 for empty, 1 + type index for occupied cells (isolated cells count as deadends)."""
    occ = grid.cells[level].astype(bool)
    masks = mask_array(grid.cells[level])
    codes = np.zeros(occ.shape, dtype=int)
    for y, x in zip(*np.nonzero(occ)):
        m = int(masks[y, x])
        topo = CLASSIFICATION[m][0] if m else TopometricType.DEADEND
        codes[y, x] = 1 + TOPO_ORDER.index(topo)
    return codes


def preview_svg(grid: OccupancyGrid) -> str:
    levels = grid.dims.levels
    fig = Figure(figsize=(3.2 * levels, 3.4))
    cmap = ListedColormap([TYPE_COLORS[None], *(TYPE_COLORS[t] for t in TOPO_ORDER)])
    for k in range(levels):
        ax = fig.add_subplot(1, levels, k + 1)
        ax.imshow(level_codes(grid, k), cmap=cmap, vmin=0, vmax=len(TOPO_ORDER), interpolation="nearest")
        for lvl, c in grid.shafts:
            if lvl in (k, k - 1):
                ax.plot(c.x, c.y, marker="^" if lvl == k else "v", color="black", markersize=4)
        ax.set_title(f"level {k}", fontsize=8)
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    return _svg(fig)
