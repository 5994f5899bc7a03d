"""SDF 1.6 world documents for an assembled manifest."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Mapping

from .world import WorldManifest

SDF_VERSION = "1.6"


def _num(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _vec(*vs: float) -> str:
    return " ".join(_num(v) for v in vs)


def _sub(parent: ET.Element, tag: str, text: str | None = None, **attrs) -> ET.Element:
    el = ET.SubElement(parent, tag, attrs)
    if text is not None:
        el.text = text
    return el


def _mesh_geometry(parent: ET.Element, uri: str, scale=(1.0, 1.0, 1.0)) -> None:
    mesh = _sub(_sub(parent, "geometry"), "mesh")
    _sub(mesh, "uri", uri)
    if tuple(scale) != (1.0, 1.0, 1.0):
        _sub(mesh, "scale", _vec(*scale))


def _material(visual: ET.Element, texture: str | None) -> None:
    if not texture:
        return
    mat = _sub(visual, "material")
    _sub(mat, "diffuse", "1 1 1 1")
    metal = _sub(_sub(mat, "pbr"), "metal")
    _sub(metal, "albedo_map", texture)


def _static_model(world: ET.Element, name: str, uri: str, pose, scale, texture: str | None) -> None:
    model = _sub(world, "model", name=name)
    _sub(model, "static", "true")
    _sub(model, "pose", _vec(*pose))
    link = _sub(model, "link", name="link")
    _mesh_geometry(_sub(link, "collision", name="collision"), uri, scale)
    visual = _sub(link, "visual", name="visual")
    _mesh_geometry(visual, uri, scale)
    _material(visual, texture)


def emit_world(
    manifest: WorldManifest,
    mesh_paths: Mapping[str, str],
    textures: Mapping[str, str] | None = None,
    split: bool = False,
    world_name: str = "cavegen_world",
) -> str:
    """Serialise a world document.

    Merged mode expects ``mesh_paths["world"]`` (already globally scaled) and
    emits one model. Split mode expects one path per asset id and emits one
    model per placement, posed and scaled here. Obstacles are emitted as
    separate models whenever their asset id is in ``mesh_paths``.

    Texture slots: ``cave_wall`` binds to tunnel tiles, ``striated_rock`` to
    shafts and ``rock_pile`` to obstacles.
    """
    textures = dict(textures or {})
    sdf = ET.Element("sdf", version=SDF_VERSION)
    world = _sub(sdf, "world", name=world_name)
    light = _sub(world, "light", name="sun", type="directional")
    _sub(light, "cast_shadows", "false")
    _sub(light, "pose", "0 0 100 0 0 0")
    _sub(light, "direction", "-0.5 0.1 -0.9")
    gs = manifest.global_scale

    if split:
        for i, p in enumerate(manifest.placements):
            pos = [t * s for t, s in zip(p.translation, gs)]
            yaw = (p.rotation % 4) * math.pi / 2
            # the global scale acts in the world frame, so odd turns swap x and y locally
            sx, sy, sz = (gs[0] * p.scale[0], gs[1] * p.scale[1], gs[2] * p.scale[2])
            local = (sy, sx, sz) if p.rotation % 2 else (sx, sy, sz)
            tex = textures.get("striated_rock" if p.kind == "shaft" else "cave_wall")
            name = f"tile_{i:05d}_L{p.level}_{p.cell.x}_{p.cell.y}"
            _static_model(world, name, mesh_paths[p.asset_id], (*pos, 0, 0, yaw), local, tex)
    elif manifest.placements:
        _static_model(world, "world", mesh_paths["world"], (0, 0, 0, 0, 0, 0), (1.0, 1.0, 1.0), textures.get("cave_wall"))

    for i, o in enumerate(manifest.obstacles):
        if o.asset_id not in mesh_paths:
            continue
        pos = [v * s for v, s in zip(o.position, gs)]
        scale = tuple(o.scale * s for s in gs)
        _static_model(world, f"obstacle_{i:05d}", mesh_paths[o.asset_id], (*pos, 0, 0, 0), scale, textures.get("rock_pile"))

    ET.indent(sdf, space="  ")
    return '<?xml version="1.0" encoding="utf-8"?>\n' + ET.tostring(sdf, encoding="unicode") + "\n"
