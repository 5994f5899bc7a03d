"""Triangle meshes: OBJ text I/O, rigid placement transforms and merging."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ParseError


@dataclass
class Mesh:
    vertices: np.ndarray  # (N, 3) float64
    faces: np.ndarray  # (F, 3) int64, 0-based

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)

    @classmethod
    def empty(cls) -> "Mesh":
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def boundary_edges(self) -> list[tuple[int, int]]:
        """Undirected edges used by exactly one face."""
        e = np.sort(np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]), axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        return [tuple(map(int, edge)) for edge in uniq[counts == 1]]

    def boundary_loops(self) -> list[list[int]]:
        """Boundary edges chained into closed vertex loops."""
        adj: dict[int, list[int]] = {}
        for a, b in self.boundary_edges():
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        loops, seen = [], set()
        for start in sorted(adj):
            if start in seen:
                continue
            loop, prev, cur = [start], None, start
            seen.add(start)
            while True:
                nxt = [v for v in adj[cur] if v != prev and (v not in seen or v == start)]
                if not nxt or nxt[0] == start:
                    break
                prev, cur = cur, nxt[0]
                seen.add(cur)
                loop.append(cur)
            loops.append(loop)
        return loops


def rotate_z(points: np.ndarray, quarter_turns: int) -> np.ndarray:
    """Quarter turns ``(x, y) -> (-y, x)``, matching grid rotation (y grows "down")."""
    out = np.array(points, dtype=np.float64, copy=True)
    for _ in range(quarter_turns % 4):
        out[:, 0], out[:, 1] = -out[:, 1].copy(), out[:, 0].copy()
    return out


def transform(vertices: np.ndarray, rotation: int, translation, scale=(1.0, 1.0, 1.0)) -> np.ndarray:
    return (rotate_z(vertices, rotation) + np.asarray(translation, dtype=np.float64)) * np.asarray(scale)


def inverse_transform(vertices: np.ndarray, rotation: int, translation, scale=(1.0, 1.0, 1.0)) -> np.ndarray:
    return rotate_z(np.asarray(vertices) / np.asarray(scale) - np.asarray(translation, dtype=np.float64), -rotation)


def concatenate(parts: list[Mesh]) -> Mesh:
    if not parts:
        return Mesh.empty()
    offsets = np.cumsum([0] + [p.n_vertices for p in parts[:-1]])
    return Mesh(
        np.concatenate([p.vertices for p in parts]),
        np.concatenate([p.faces + off for p, off in zip(parts, offsets)]),
    )


def dumps_obj(mesh: Mesh, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines += [f"v {x:.6f} {y:.6f} {z:.6f}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return "\n".join(lines) + "\n"


def loads_obj(text: str, source: str = "<obj>") -> Mesh:
    """Positions and faces of an ASCII OBJ; polygons are fan-triangulated with a warning."""
    verts, faces = [], []
    fanned = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        if parts[0] == "v":
            try:
                verts.append([float(v) for v in parts[1:4]])
            except ValueError as exc:
                raise ParseError(f"{source}: bad vertex", f"line {lineno}") from exc
            if len(verts[-1]) != 3:
                raise ParseError(f"{source}: vertex needs 3 coordinates", f"line {lineno}")
        elif parts[0] == "f":
            try:
                idx = [int(p.split("/")[0]) for p in parts[1:]]
            except ValueError as exc:
                raise ParseError(f"{source}: bad face", f"line {lineno}") from exc
            if len(idx) < 3:
                raise ParseError(f"{source}: face needs 3+ vertices", f"line {lineno}")
            # negative indices are relative to the vertices read so far
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            if any(not 0 <= i < len(verts) for i in idx):
                raise ParseError(f"{source}: face index out of range", f"line {lineno}")
            if len(idx) > 3:
                fanned += 1
            faces += [[idx[0], idx[k], idx[k + 1]] for k in range(1, len(idx) - 1)]
    if fanned:
        warnings.warn(f"{source}: fan-triangulated {fanned} non-triangular face(s)", stacklevel=2)
    return Mesh(np.array(verts, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))
