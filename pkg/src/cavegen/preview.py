"""ASCII topology maps."""

from __future__ import annotations

from .grid import CLASSIFICATION, OccupancyGrid, TopometricType, mask_array

GLYPHS = {
    TopometricType.DEADEND: "D",
    TopometricType.CORNER: "C",
    TopometricType.JUNCTION: "J",
    TopometricType.INTERSECTION: "I",
}
ISOLATED = "o"
SHAFT_DOWN = "S"  # shaft leaving this level upward
SHAFT_UP = "s"  # shaft arriving from the level below


def glyph(mask: int) -> str:
    if mask == 0:
        return ISOLATED
    topo, rot = CLASSIFICATION[mask]
    if topo is TopometricType.PATHWAY:
        return "=" if rot % 2 == 0 else "|"
    return GLYPHS[topo]


def ascii_level(grid: OccupancyGrid, level: int) -> list[str]:
    occ = grid.cells[level].astype(bool)
    masks = mask_array(grid.cells[level])
    rows = [[glyph(int(masks[y, x])) if occ[y, x] else " " for x in range(grid.dims.cols)] for y in range(grid.dims.rows)]
    for k, c in grid.shafts:
        if k == level:
            rows[c.y][c.x] = SHAFT_DOWN
        elif k + 1 == level:
            rows[c.y][c.x] = SHAFT_UP
    return ["".join(r).rstrip() for r in rows]


def ascii_map(grid: OccupancyGrid) -> str:
    """One block per level; isolated cells print as ``o`` instead of failing."""
    blocks = []
    for level in range(grid.dims.levels):
        blocks.append("\n".join([f"level {level}", *ascii_level(grid, level)]))
    return "\n\n".join(blocks) + "\n"
