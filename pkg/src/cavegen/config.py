"""
Environment presets and run configuration.

A config file is a JSON object. Every field is optional; a ``preset`` field
starts from that preset's ranges and the remaining fields override them::

    {
      "preset": "natural-cave",
      "seed": 7,
      "levels": 1,
      "rows": 24, "cols": 24,
      "descriptor": "parabolic",          # linear | parabolic | sine
      "junctions": [1, 3],                # int or [lo, hi], per level
      "loops": 0,
      "intersections": 1,
      "min_length": [1000, 2000],         # metres, int/float or [lo, hi]
      "max_width": 45,
      "penalty": 100,
      "amplitude_fraction": 0.25,
      "sampling_factor": 2,
      "obstacle_density": 0.2,
      "tunnel_width": 4, "tunnel_height": 4,
      "catalog": "catalog.json",
      "textures": {"cave_wall": "textures/wall.png"}
    }

Ranges are drawn uniformly (inclusive) from a stream seeded by the world
seed, so the same seed always resolves to the same concrete spec.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError
from .grid import GridDims
from .pathgen import (
    DEFAULT_AMPLITUDE_FRACTION,
    DEFAULT_PENALTY,
    DEFAULT_SAMPLING_FACTOR,
    HARMONIC_NAMES,
    RouteDescriptor,
)
from .rng import stream
from .structural import UNIT_ORDER, LevelRequest, Unit

MIN_GRID = 12
CELLS_PER_UNIT = 6
DEFAULT_OBSTACLE_DENSITY = 0.2
DEFAULT_TUNNEL_WIDTH = 4.0
DEFAULT_TUNNEL_HEIGHT = 4.0

Range = tuple[float, float]


@dataclass(frozen=True)
class PresetRanges:
    descriptor: str
    levels: int
    min_length: Range  # metres
    max_width: Range  # metres
    loops: tuple[int, int]
    junctions: tuple[int, int]
    intersections: tuple[int, int]


PRESETS: dict[str, PresetRanges] = {
    "operational-mine": PresetRanges("linear", 3, (2000.0, 4000.0), (80.0, 100.0), (0, 0), (0, 2), (0, 2)),
    "natural-cave": PresetRanges("parabolic", 1, (1000.0, 2000.0), (40.0, 50.0), (0, 2), (1, 3), (1, 3)),
    "lava-tube": PresetRanges("sine", 5, (3000.0, 5000.0), (40.0, 50.0), (0, 0), (1, 3), (0, 1)),
}
CUSTOM = PresetRanges("parabolic", 1, (1000.0, 1000.0), (40.0, 40.0), (0, 0), (1, 1), (1, 1))


@dataclass
class EnvironmentSpec:
    name: str
    seed: int
    dims: GridDims
    descriptor: RouteDescriptor
    requests: list[LevelRequest]
    min_length: float
    max_width: float
    penalty: float = DEFAULT_PENALTY
    obstacle_density: float = DEFAULT_OBSTACLE_DENSITY
    tunnel_width: float = DEFAULT_TUNNEL_WIDTH
    tunnel_height: float = DEFAULT_TUNNEL_HEIGHT
    catalog: str | None = None
    textures: dict[str, str] = field(default_factory=dict)

    @property
    def levels(self) -> int:
        return self.dims.levels

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "dims": {"l": self.dims.levels, "m": self.dims.rows, "n": self.dims.cols},
            "descriptor": self.descriptor.name,
            "amplitude_fraction": self.descriptor.amplitude_fraction,
            "sampling_factor": self.descriptor.sampling_factor,
            "penalty": self.penalty,
            "requests": [
                {"junctions": r.junctions, "loops": r.loops, "intersections": r.intersections,
                 "fill": r.fill, "fill_units": [u.value for u in r.fill_units]}
                for r in self.requests
            ],
            "min_length": self.min_length,
            "max_width": self.max_width,
            "obstacle_density": self.obstacle_density,
            "tunnel_width": self.tunnel_width,
            "tunnel_height": self.tunnel_height,
            "catalog": self.catalog,
            "textures": dict(sorted(self.textures.items())),
        }


def _int_range(value, where: str) -> tuple[int, int]:
    if isinstance(value, bool):
        raise ParseError("expected an integer or [lo, hi]", where)
    if isinstance(value, int):
        lo = hi = value
    elif isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        lo, hi = value
    else:
        raise ParseError("expected an integer or [lo, hi]", where)
    if lo < 0 or hi < lo:
        raise ParseError(f"invalid range [{lo}, {hi}]", where)
    return lo, hi


def _float_range(value, where: str) -> Range:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        lo = hi = float(value)
    elif isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        lo, hi = float(value[0]), float(value[1])
    else:
        raise ParseError("expected a number or [lo, hi]", where)
    if lo <= 0 or hi < lo:
        raise ParseError(f"invalid range [{lo}, {hi}]", where)
    return lo, hi


def _positive(value, where: str, minimum: float = 0.0, strict: bool = True) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError("expected a number", where)
    if value < minimum or (strict and value == minimum):
        raise ParseError(f"must be {'>' if strict else '>='} {minimum}", where)
    return float(value)


def _draw_int(rng: np.random.Generator, r: tuple[int, int]) -> int:
    return int(rng.integers(r[0], r[1] + 1))


def _draw_float(rng: np.random.Generator, r: Range) -> float:
    return float(r[0]) if r[0] == r[1] else float(rng.uniform(r[0], r[1]))


def default_side(requests: list[LevelRequest]) -> int:
    """Square grid edge: ``max(12, 6 * units)`` for the busiest level."""
    return max(MIN_GRID, CELLS_PER_UNIT * max(r.total for r in requests))


def resolve(config: dict | None = None, seed: int | None = None) -> EnvironmentSpec:
    """Concrete spec from a config object (see module docstring)."""
    cfg = dict(config or {})
    known = {
        "preset", "seed", "levels", "rows", "cols", "descriptor", "junctions", "loops", "intersections",
        "min_length", "max_width", "penalty", "amplitude_fraction", "sampling_factor", "obstacle_density",
        "tunnel_width", "tunnel_height", "catalog", "textures",
    }
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ParseError(f"unknown config field(s): {', '.join(unknown)}", "$")
    name = cfg.get("preset") or "custom"
    if name != "custom" and name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    base = PRESETS.get(name, CUSTOM)
    if seed is None:
        seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ParseError("seed must be a non-negative integer", "$.seed")

    descriptor_name = cfg.get("descriptor", base.descriptor)
    if descriptor_name not in HARMONIC_NAMES.values():
        raise ParseError(f"unknown descriptor {descriptor_name!r}", "$.descriptor")
    levels = cfg.get("levels", base.levels)
    if not isinstance(levels, int) or isinstance(levels, bool) or levels < 1:
        raise ParseError("levels must be a positive integer", "$.levels")
    ranges = {
        Unit.JUNCTION: _int_range(cfg["junctions"], "$.junctions") if "junctions" in cfg else base.junctions,
        Unit.LOOP: _int_range(cfg["loops"], "$.loops") if "loops" in cfg else base.loops,
        Unit.INTERSECTION: _int_range(cfg["intersections"], "$.intersections") if "intersections" in cfg else base.intersections,
    }
    length_r = _float_range(cfg["min_length"], "$.min_length") if "min_length" in cfg else base.min_length
    width_r = _float_range(cfg["max_width"], "$.max_width") if "max_width" in cfg else base.max_width

    rng = stream(seed, "spec")
    min_length = _draw_float(rng, length_r)
    max_width = _draw_float(rng, width_r)
    # fill only with unit types the ranges allow, so a loop-free preset stays loop-free
    fill_units = tuple(u for u in UNIT_ORDER if ranges[u][1] > 0) or (Unit.JUNCTION,)
    requests = []
    for _ in range(levels):
        j, lp, i = (_draw_int(rng, ranges[u]) for u in UNIT_ORDER)
        fill = 1 if j + lp + i == 0 else 0
        requests.append(LevelRequest(j, lp, i, fill, fill_units))

    side = default_side(requests)
    rows = cfg.get("rows", side)
    cols = cfg.get("cols", side)
    for key, v in (("rows", rows), ("cols", cols)):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ParseError("must be an integer", f"$.{key}")
    try:
        dims = GridDims(levels, rows, cols)
        descriptor = RouteDescriptor.named(
            descriptor_name,
            amplitude_fraction=_positive(cfg.get("amplitude_fraction", DEFAULT_AMPLITUDE_FRACTION), "$.amplitude_fraction"),
            sampling_factor=_positive(cfg.get("sampling_factor", DEFAULT_SAMPLING_FACTOR), "$.sampling_factor"),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), "$") from None
    penalty = _positive(cfg.get("penalty", DEFAULT_PENALTY), "$.penalty", 1.0)
    textures = cfg.get("textures", {})
    if not isinstance(textures, dict):
        raise ParseError("textures must be an object", "$.textures")
    catalog = cfg.get("catalog")
    if catalog is not None and not isinstance(catalog, str):
        raise ParseError("catalog must be a path", "$.catalog")
    return EnvironmentSpec(
        name=name,
        seed=seed,
        dims=dims,
        descriptor=descriptor,
        requests=requests,
        min_length=min_length,
        max_width=max_width,
        penalty=penalty,
        obstacle_density=_positive(cfg.get("obstacle_density", DEFAULT_OBSTACLE_DENSITY), "$.obstacle_density", strict=False),
        tunnel_width=_positive(cfg.get("tunnel_width", DEFAULT_TUNNEL_WIDTH), "$.tunnel_width"),
        tunnel_height=_positive(cfg.get("tunnel_height", DEFAULT_TUNNEL_HEIGHT), "$.tunnel_height"),
        catalog=catalog,
        textures={str(k): str(v) for k, v in textures.items()},
    )


def resolve_preset(name: str, seed: int = 0) -> EnvironmentSpec:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return resolve({"preset": name}, seed)


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path.name}: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(data, dict):
        raise ParseError("config must be a JSON object", "$")
    # relative catalog paths are relative to the config file
    if isinstance(data.get("catalog"), str) and not Path(data["catalog"]).is_absolute():
        data["catalog"] = str(path.parent / data["catalog"])
    return data

