"""Command line front end.

One verb per construct: ``supertile`` renders a depth collection,
``tiling`` renders a blowup patch, ``attractor`` renders a point cloud,
``export`` writes the tile-list format and ``verify`` runs a check suite.
Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .algebra import QuarticScalar
from .paramexpr import ParseError, parse_param
from .processing import blowup_tiling, process
from .render import render_cloud, render_svg
from .sifs import attractor_cloud, supertile, tile_lines
from .systems import get_family
from .verify import SUITES, run_verify

WORKERS_ENV = "SIFSTILE_WORKERS"


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _family_from(args) -> "object":
    c: QuarticScalar | None = None
    if getattr(args, "c", None) is not None:
        c = parse_param(args.c)
        if args.system != "hat":
            raise SystemExit2(f"--c applies to the hat system only")
    return get_family(args.system, c)


class SystemExit2(Exception):
    """Usage error carried to the top-level handler."""


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _cmd_supertile(args) -> int:
    family = _family_from(args)
    if args.raw:
        tiles = supertile(family, args.depth)
    else:
        tiles = process(family, args.depth, detect_partial=False).tiles
    _write(args.out, render_svg(tiles, family.prototiles))
    print(f"wrote {args.out} ({len(tiles)} tiles)")
    return 0


def _cmd_tiling(args) -> int:
    family = _family_from(args)
    patch = blowup_tiling(family, args.blowup, args.depth)
    _write(args.out, render_svg(patch.tiles, family.prototiles))
    print(
        f"wrote {args.out} ({len(patch.tiles)} tiles, "
        f"stabilised at depth {patch.stabilization_depth})"
    )
    return 0


def _cmd_attractor(args) -> int:
    family = _family_from(args)
    level = family.limit if args.level is None else family.level(args.level)
    cloud = attractor_cloud(level, args.depth, cap=args.cap)
    _write(args.out, render_cloud(cloud))
    print(f"wrote {args.out} ({len(cloud)} points)")
    return 0


def _cmd_export(args) -> int:
    family = _family_from(args)
    if args.blowup is not None:
        patch = blowup_tiling(family, args.blowup, args.depth)
        lines = patch.export_lines()
    elif args.raw:
        lines = tile_lines(supertile(family, args.depth))
    else:
        lines = tile_lines(process(family, args.depth, detect_partial=False).tiles)
    _write(args.out, "\n".join(lines) + "\n")
    print(f"wrote {args.out} ({len(lines)} lines)")
    return 0


def _cmd_verify(args) -> int:
    return run_verify(args.suite, workers=_workers())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sifstile",
        description="tilings from sequential iterated function systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_c=True):
        p.add_argument("--system", choices=("hat", "hex"), required=True)
        if with_c:
            p.add_argument(
                "--c",
                help="exact hat parameter, e.g. '1/(1+sqrt3)' (default)",
            )

    p = sub.add_parser("supertile", help="render a depth-k collection")
    add_common(p)
    p.add_argument("--depth", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--raw", action="store_true", help="keep coincident tiles")
    mode.add_argument("--processed", action="store_true", help="cut overlaps (default)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_supertile)

    p = sub.add_parser("tiling", help="render a unit-scale blowup patch")
    add_common(p)
    p.add_argument("--blowup", default="1", help="address stream, cycled (default 1)")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tiling)

    p = sub.add_parser("attractor", help="render an attractor point cloud")
    add_common(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--limit", action="store_true", help="limit system (default)")
    group.add_argument("--level", type=int, help="use the level-n system instead")
    p.add_argument("--depth", type=int, required=True, help="address length")
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_attractor)

    p = sub.add_parser("export", help="write the tile-list text format")
    add_common(p)
    p.add_argument("--depth", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--raw", action="store_true")
    mode.add_argument("--processed", action="store_true")
    p.add_argument("--blowup", help="export a blowup patch with header line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, SystemExit2, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
