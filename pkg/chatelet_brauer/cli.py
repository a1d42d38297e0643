"""
cli.py — Command-line front end for chatelet-brauer.

Subcommands:
    classify       Br X / Br_0 X and the Galois case of the surface
    generators     an explicit unit triple for a generator, with its checks
    search-points  points of X(Z_p) with small x, y
    sweep          relative local invariants at a list of points

Exit codes: 0 success, 2 usage, 3 unsupported family, 4 precision failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence, TextIO

from pydantic import ValidationError

from . import __version__
from .chatelet import brauer_quotient, explicit_generator, family_spec, verify_class_order
from .config import RunConfig
from .errors import EXIT_OK, EXIT_USAGE, ChateletError, UsageError, exit_code_for
from .localinv import reference_rows, points_from_pairs, sweep
from .models import SurfaceSpec
from .padic import PadicCtx, point_from_xy, search_points

logger = logging.getLogger("chatelet_brauer.cli")


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def parse_pairs(text: str) -> list[tuple[int, int]]:
    """Parse "x,y;x,y" into integer pairs."""
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        try:
            x, y = (int(v) for v in parts)
        except ValueError as exc:
            raise UsageError(f"expected 'x,y', got {chunk!r}") from exc
        pairs.append((x, y))
    return pairs


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    surface = common.add_argument_group("surface")
    surface.add_argument("--a", help="a in x^2 - a*y^2 = c*P(t)")
    surface.add_argument("--c", help="c in x^2 - a*y^2 = c*P(t)")
    surface.add_argument("--P", help='P(t), e.g. "t^4-22"')
    surface.add_argument("--m", type=int, help="shorthand for x^2 + y^2 = -(t^4 - m)")
    run = common.add_argument_group("run")
    run.add_argument("--p", type=int, help="prime for local computations")
    run.add_argument("--precision", type=int, help="p-adic digits (default 24)")
    run.add_argument("--guard", type=int, help="guard digits (default 6)")
    run.add_argument("--d", type=int, help="unramified degree, 0 for automatic")
    run.add_argument("--seed", type=int, help="Hilbert 90 seed")
    run.add_argument("--jobs", type=int, help="sweep worker threads")
    run.add_argument("--embedding", type=int, help="group element fixing the embedding")
    run.add_argument("--format", choices=["table", "json-lines"], help="output format")
    run.add_argument("--points", help='points as "x,y;x,y;..."')
    run.add_argument("--base", help='base point as "x,y"')
    run.add_argument("--bound", type=int, help="search bound on x and y")
    run.add_argument("--config", help="key=value file with the same keys as the flags")
    run.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chatelet-brauer",
        description="Brauer groups and local invariants of affine Châtelet surfaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()
    sub.add_parser("classify", parents=[common], help="Br X / Br_0 X")
    sub.add_parser("generators", parents=[common], help="explicit generator triple")
    sub.add_parser("search-points", parents=[common], help="points of X(Z_p)")
    sub.add_parser("sweep", parents=[common], help="relative local invariants")
    return parser


_FLAG_FIELDS = (
    "a", "c", "P", "m", "p", "precision", "guard", "d", "seed", "jobs",
    "embedding", "points", "base", "bound",
)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {name: getattr(args, name) for name in _FLAG_FIELDS}
    overrides["output_format"] = args.format
    if args.config:
        return RunConfig.from_file(args.config, **overrides)
    return RunConfig(**{k: v for k, v in overrides.items() if v is not None})


def spec_from_config(config: RunConfig) -> SurfaceSpec:
    if config.m is not None:
        if any(v is not None for v in (config.a, config.c, config.P)):
            raise UsageError("give either --m or --a/--c/--P, not both")
        return family_spec(config.m).validate()
    if config.P is None:
        raise UsageError("a surface needs --P (with --a and --c) or --m")
    return SurfaceSpec.from_text(
        config.a if config.a is not None else -1,
        config.c if config.c is not None else 1,
        config.P,
        label=f"P = {config.P}",
    ).validate()


def _require_p(config: RunConfig) -> int:
    if config.p is None:
        raise UsageError("this subcommand needs --p")
    return config.p


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_classify(config: RunConfig, out: TextIO) -> int:
    spec = spec_from_config(config)
    bq = brauer_quotient(spec)
    if config.output_format == "json-lines":
        record = {"surface": spec.to_dict(), "type": bq.type, "invariants": bq.invariants}
        if bq.case is not None:
            record["galois_group"] = bq.case.galois_group
            record["case"] = bq.case.label
        print(json.dumps(record, sort_keys=True), file=out)
        return EXIT_OK
    print(str(spec), file=out)
    print(str(bq), file=out)
    group = f"{bq.case.galois_group}, {bq.case.label}, " if bq.case is not None else ""
    print(f"  Summary : {group}Br = {bq.type}", file=out)
    return EXIT_OK


def cmd_generators(config: RunConfig, out: TextIO) -> int:
    spec = spec_from_config(config)
    bq = brauer_quotient(spec)
    if bq.order == 1:
        print(f"{spec}: Br X / Br_0 X = 0, no nontrivial generator", file=out)
        return EXIT_OK
    cls = explicit_generator(spec)
    lines = [
        str(spec),
        str(cls),
        "  Checks     : divisors match the connecting image; r, s, t fixed by g, h, gh;"
        " N_h(r) = N_g(s·t)",
    ]
    if config.p is not None:
        report = verify_class_order(spec, cls, config.p, config)
        lines.append(str(report))
    if config.output_format == "json-lines":
        record = {
            "surface": spec.to_dict(),
            "triple": [str(u) for u in cls.unit_triple],
            "order": cls.order_in_quotient,
            "provenance": cls.provenance,
        }
        print(json.dumps(record, sort_keys=True), file=out)
    else:
        print("\n".join(lines), file=out)
    return EXIT_OK


def cmd_search_points(config: RunConfig, out: TextIO) -> int:
    spec = spec_from_config(config)
    p = _require_p(config)
    points = search_points(spec, p, config.bound, PadicCtx.from_config(p, config))
    if config.output_format == "json-lines":
        for pt in points:
            record = {"p": pt.p, "x": pt.x, "y": pt.y, "t": str(pt.t), "precision": pt.precision}
            print(json.dumps(record, sort_keys=True), file=out)
        return EXIT_OK
    print(f"=== Points of {spec} over Z_{p}, 0 <= x, y <= {config.bound} ===", file=out)
    for pt in points:
        print(f"  ({pt.x},{pt.y})  t = {pt.t} mod {p}^{pt.precision}", file=out)
    print(f"  Total : {len(points)}", file=out)
    return EXIT_OK


def cmd_sweep(config: RunConfig, out: TextIO) -> int:
    spec = spec_from_config(config)
    rows = reference_rows(config.m) if config.m is not None else []
    p = config.p if config.p is not None else (rows[0][1] if rows else _require_p(config))
    if config.points:
        pairs = parse_pairs(config.points)
    elif rows and p == rows[0][1]:
        pairs = [xy for _, _, xy, _ in rows]
    else:
        ctx = PadicCtx.from_config(p, config)
        pairs = [pt.xy for pt in search_points(spec, p, config.bound, ctx)]
    points = points_from_pairs(spec, p, pairs, config)
    base = None
    if config.base:
        base_pairs = parse_pairs(config.base)
        if len(base_pairs) != 1:
            raise UsageError(f"--base takes a single 'x,y', got {config.base!r}")
        base = point_from_xy(spec, p, *base_pairs[0], PadicCtx.from_config(p, config))
        if base is None:
            raise UsageError(f"base point {config.base} has no t in Z_{p}")
    report = sweep(spec, p, points, base, config)
    if config.output_format == "json-lines":
        for record in report.records:
            print(record.to_json(), file=out)
    else:
        print(str(report), file=out)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "generators": cmd_generators,
    "search-points": cmd_search_points,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        config = config_from_args(args)
        return COMMANDS[args.command](config, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ChateletError as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
