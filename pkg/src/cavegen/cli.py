"""
Command line entry point.

    cavegen generate --preset natural-cave --seed 7 --out out/cave7
    cavegen batch --preset lava-tube --count 20 --seed 42 --out data --no-mesh
    cavegen analyze data --out data/report
    cavegen preview out/cave7/occupancy.json --svg cave7.svg
    cavegen catalog validate my_tiles.json

Exit status: 0 success, 1 invalid input or usage, 2 generation failure,
3 batch finished with some failed worlds.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .assembly import load_catalog
from .config import PRESETS, load_config, resolve
from .errors import CaveGenError, CatalogIncomplete, ParseError
from .grid import load_occupancy
from .io import atomic_write
from .pipeline import OUTPUT_FORMATS, batch, generate
from .plotting import preview_svg
from .preview import ascii_map
from .report import analyze

EXIT_OK, EXIT_INVALID, EXIT_GENERATION, EXIT_PARTIAL = 0, 1, 2, 3
OUT_ENV = "CAVEGEN_OUT"

log = logging.getLogger("cavegen")


def _default_out() -> str:
    return os.environ.get(OUT_ENV, "out")


def _add_world_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), help="environment preset")
    p.add_argument("--config", type=Path, help="JSON config file; flags override its fields")
    p.add_argument("--seed", type=int, help="world seed (batch: master seed)")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./out)")
    p.add_argument("--rows", type=int, help="grid rows per level")
    p.add_argument("--cols", type=int, help="grid columns per level")
    p.add_argument("--levels", type=int, help="number of levels")
    p.add_argument("--penalty", type=float, help="cost of leaving the guide cells (> 1)")
    p.add_argument("--amplitude-fraction", type=float, help="route amplitude as a fraction of min(rows, cols)")
    p.add_argument("--sampling-factor", type=float, help="guide samples per cell of segment length")
    p.add_argument("--no-mesh", action="store_true", help="write occupancy and manifest only")
    p.add_argument("--split-tiles", action="store_true", help="one model per tile instead of a merged mesh")
    p.add_argument(
        "--format",
        action="append",
        choices=OUTPUT_FORMATS,
        help="output to write; repeat for several (default: all)",
    )


def _config_from_args(args) -> dict:
    cfg = load_config(args.config) if args.config else {}
    overrides = {
        "preset": args.preset,
        "rows": args.rows,
        "cols": args.cols,
        "levels": args.levels,
        "penalty": args.penalty,
        "amplitude_fraction": args.amplitude_fraction,
        "sampling_factor": args.sampling_factor,
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg


def _formats(args) -> tuple[str, ...]:
    formats = tuple(dict.fromkeys(args.format or OUTPUT_FORMATS))
    if args.no_mesh:
        formats = tuple(f for f in formats if f in ("occupancy", "manifest"))
    return formats


def cmd_generate(args) -> int:
    cfg = _config_from_args(args)
    spec = resolve(cfg, args.seed)
    out = args.out or Path(_default_out())
    result = generate(spec, out, _formats(args), split=args.split_tiles)
    summary = result.summary()
    print(f"world seed {spec.seed} ({spec.name}, {spec.descriptor.name}) -> {out}")
    print(f"  grid {spec.dims.levels}x{spec.dims.rows}x{spec.dims.cols}, {summary['occupied']} occupied cells, "
          f"{summary['placements']} placements, {summary['shafts']} shafts, {summary['obstacles']} obstacles")
    for k, lv in enumerate(summary["levels"]):
        req, got = lv["requested"], lv["found"]
        print(f"  level {k}: junctions {got['junctions']}/{req['junctions']}  loops {got['loops']}/{req['loops']}  "
              f"intersections {got['intersections']}/{req['intersections']}  (found/requested)")
    return EXIT_OK


def cmd_batch(args) -> int:
    cfg = _config_from_args(args)
    if args.count < 1:
        raise ValueError("--count must be >= 1")
    master = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    cfg.pop("seed", None)
    # validate the config once up front so a typo is a usage error, not N failures
    resolve(cfg, master)
    out = args.out or Path(_default_out())
    index = batch(cfg, args.count, master, out, args.parallelism, _formats(args), split=args.split_tiles)
    print(f"{index['count'] - index['failed']}/{index['count']} worlds written to {out / index['preset']}")
    return EXIT_PARTIAL if index["failed"] else EXIT_OK


def cmd_analyze(args) -> int:
    out = args.out or Path(_default_out()) / "report"
    report, got = analyze(args.inputs, out, args.group_by)
    for path, why in got.skipped:
        print(f"warning: skipped {path}: {why}", file=sys.stderr)
    sys.stdout.write(
        "\n".join(f"{label}: {len(g.ids)} worlds, mean similarity {g.mean_similarity:.4f}" for label, g in report.groups.items())
        + f"\nreport written to {out}\n"
    )
    return EXIT_OK


def cmd_preview(args) -> int:
    grid = load_occupancy(args.file)
    sys.stdout.write(ascii_map(grid))
    if args.svg:
        atomic_write(args.svg, preview_svg(grid))
    return EXIT_OK


def cmd_catalog_validate(args) -> int:
    catalog = load_catalog(args.file, fallback=args.fallback)
    for kind, assets in catalog.groups.items():
        print(f"{kind}: {', '.join(a.id for a in assets)}")
    print(f"obstacles: {', '.join(a.id for a in catalog.obstacles)}")
    print(f"tile size {catalog.tile_size:g} m, level height {catalog.level_height:g} m: ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavegen", description="Generate underground tunnel worlds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate one world")
    _add_world_options(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("batch", help="generate a dataset of worlds")
    _add_world_options(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--parallelism", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("analyze", help="similarity, symmetry and tile appearance of a dataset")
    p.add_argument("inputs", nargs="+", help="dataset directories or occupancy files")
    p.add_argument("--out", type=Path)
    p.add_argument("--group-by", choices=("preset", "dir"), default="preset")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("preview", help="ASCII (and optional SVG) map of an occupancy file")
    p.add_argument("file", type=Path)
    p.add_argument("--svg", type=Path)
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("catalog", help="tile catalog tools")
    csub = p.add_subparsers(dest="catalog_command", required=True)
    v = csub.add_parser("validate", help="check a catalog document")
    v.add_argument("file", type=Path)
    v.add_argument("--fallback", action="store_true", help="fill missing groups with builtin tiles")
    v.set_defaults(func=cmd_catalog_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, CatalogIncomplete) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CaveGenError as exc:
        print(f"generation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
