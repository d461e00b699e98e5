"""Command-line front end.

Subcommands: vertices (polytope census), eval (criteria of one box), sweep
(classified slice grid as CSV or SVG), boundary (criterion radii along rays),
merge (quantumness vs information-causality boundary comparison), game
(guessing-game run), scan (depth threshold search) and verify (randomized
self-check suites).  Same arguments and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import functools
import io
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__, criteria, slices, verify
from .boxes import (
    CorrelatorVector,
    JointBox,
    box_from_correlators,
    box_from_dict,
    box_to_dict,
    enumerate_vertices,
    maximally_mixed,
    vertex_box,
)
from .game import GameConfig, exact_total_information, ic_threshold_scan, monte_carlo_game, total_information_by_level

_FORMATTER = functools.partial(argparse.HelpFormatter, width=80)


def _round12(obj):
    """Round every float to 12 significant digits for stable output."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_round12(obj), indent=2) + "\n"


def _write_output(text: str, out: str | None) -> None:
    """Write to stdout, or atomically to a file."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_box(parser: argparse.ArgumentParser, args) -> JointBox:
    if getattr(args, "c", None):
        parts = args.c.split(",")
        if len(parts) != 4:
            parser.error("--c expects four comma-separated correlators")
        try:
            c = CorrelatorVector(*(float(p) for p in parts))
            return box_from_correlators(c)
        except ValueError as exc:
            parser.error(str(exc))
    spec = getattr(args, "box", None)
    if spec is None:
        parser.error("need a box: --box NAME|PATH or --c C00,C01,C10,C11")
    if spec == "mixed":
        return maximally_mixed()
    if spec.startswith(("NL", "L")) and not os.path.exists(spec):
        try:
            return vertex_box(spec)
        except ValueError as exc:
            parser.error(str(exc))
    try:
        with open(spec) as handle:
            return box_from_dict(json.load(handle))
    except OSError as exc:
        parser.error(f"cannot read box file {spec!r}: {exc}")
    except (KeyError, ValueError) as exc:
        parser.error(f"bad box file {spec!r}: {exc}")


def _parse_family(parser: argparse.ArgumentParser, spec: str) -> slices.MixtureFamily:
    try:
        return slices.MixtureFamily.parse(spec)
    except ValueError as exc:
        parser.error(str(exc))


def _csv_line(values) -> str:
    cells = []
    for v in values:
        if isinstance(v, bool):
            cells.append(str(int(v)))
        elif isinstance(v, float):
            cells.append(slices.fmt12(v))
        else:
            cells.append(str(v))
    return ",".join(cells)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_vertices(parser, args) -> int:
    rows = []
    for name, box in enumerate_vertices():
        report = criteria.full_report(box).to_dict()
        rows.append((name, report))
    if args.format == "json":
        text = _dump_json([{"name": name, **rep} for name, rep in rows])
    else:
        lines = ["name," + ",".join(criteria.CRITERIA_COLUMNS)]
        for name, rep in rows:
            lines.append(_csv_line([name] + [rep[c] for c in criteria.CRITERIA_COLUMNS]))
        text = "\n".join(lines) + "\n"
    _write_output(text, args.out)
    return 0


def cmd_eval(parser, args) -> int:
    box = _parse_box(parser, args)
    report = criteria.full_report(box).to_dict()
    if args.format == "csv":
        text = (
            ",".join(criteria.CRITERIA_COLUMNS)
            + "\n"
            + _csv_line([report[c] for c in criteria.CRITERIA_COLUMNS])
            + "\n"
        )
    else:
        payload = dict(report)
        payload["box"] = box_to_dict(box)
        text = _dump_json(payload)
    _write_output(text, args.out)
    return 0


def cmd_sweep(parser, args) -> int:
    family = _parse_family(parser, args.family)
    grid = slices.sweep(family, resolution=args.resolution)
    if args.format == "svg":
        text = grid.to_svg()
    else:
        buf = io.StringIO()
        grid.to_csv(buf)
        text = buf.getvalue()
    _write_output(text, args.out)
    return 0


def cmd_boundary(parser, args) -> int:
    family = _parse_family(parser, args.family)
    curves = slices.boundary_curves(family, n_rays=args.rays, tol=args.tol)
    if args.format == "json":
        text = _dump_json(
            [
                {
                    "theta": b.theta,
                    "r_local": b.r_local,
                    "r_tlm": b.r_tlm,
                    "r_ic": b.r_ic,
                    "r_nls": b.r_nls,
                    "r_third": b.r_third,
                    "r_ns": b.r_ns,
                    "merge_gap": b.merge_gap,
                }
                for b in curves
            ]
        )
    else:
        buf = io.StringIO()
        slices.boundary_to_csv(curves, buf)
        text = buf.getvalue()
    _write_output(text, args.out)
    return 0


def cmd_merge(parser, args) -> int:
    family = _parse_family(parser, args.family)
    report = slices.merge_report(family, n_rays=args.rays, tol=args.tol)
    summary = (
        f"family {family.name}: {args.rays} rays, "
        f"max |r_ic - r_tlm| = {slices.fmt12(report.max_discrepancy)}\n"
    )
    if args.out is None and args.format == "json":
        _write_output(_dump_json(report.to_dict()), None)
    else:
        sys.stdout.write(summary)
    if args.out is not None:
        if args.format == "csv":
            lines = ["theta,r_tlm,r_ic,merge_gap"]
            for t, q, i in zip(report.thetas, report.r_tlm, report.r_ic):
                lines.append(_csv_line([float(t), float(q), float(i), abs(float(i - q))]))
            _write_output("\n".join(lines) + "\n", args.out)
        else:
            _write_output(_dump_json(report.to_dict()), args.out)
    return 0


def cmd_game(parser, args) -> int:
    box = _parse_box(parser, args)
    mode = "monte_carlo" if args.mode == "mc" else "exact"
    config = GameConfig(box=box, n=args.n, mode=mode, trials=args.trials, seed=args.seed)
    if mode == "exact":
        result = exact_total_information(config)
        payload = result.to_dict()
    else:
        result, transcript = monte_carlo_game(config)
        payload = result.to_dict()
        payload["transcript_sha256"] = transcript.sha256()
    _write_output(_dump_json(payload), args.out)
    return 0


def cmd_scan(parser, args) -> int:
    box = _parse_box(parser, args)
    level = ic_threshold_scan(box, n_max=args.n_max)
    totals = total_information_by_level(box, args.n_max)
    payload = {
        "n_max": args.n_max,
        "first_violation_level": level,
        "totals_by_level": totals,
    }
    _write_output(_dump_json(payload), args.out)
    return 0


def cmd_verify(parser, args) -> int:
    names = args.suite or None
    try:
        results = verify.run_suites(names, seed=args.seed, samples=args.samples)
    except KeyError as exc:
        parser.error(str(exc.args[0]))
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        sys.stdout.write(
            f"[{status}] {res.name}: checked={res.checked} failures={res.failures}\n"
        )
        for detail in res.details[:5]:
            sys.stdout.write(f"         {detail}\n")
        failures += res.failures
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_box_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--box",
        help="vertex name (NL000, L0101), 'mixed', or a box JSON file path",
    )
    sub.add_argument("--c", help="inline correlators C00,C01,C10,C11")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsboxes",
        description="Non-signalling box toolkit: criteria, slices and the guessing game.",
        formatter_class=_FORMATTER,
    )
    parser.add_argument("--version", action="version", version=f"nsboxes {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser(
        "vertices",
        help="criteria table for all 24 polytope vertices",
        formatter_class=_FORMATTER,
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_vertices)

    p = subs.add_parser(
        "eval",
        help="evaluate every criterion on one box",
        formatter_class=_FORMATTER,
    )
    _add_box_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser(
        "sweep",
        help="classify a (lambda, eta) slice grid",
        formatter_class=_FORMATTER,
    )
    p.add_argument("--family", required=True, help="slice family, e.g. NL000+NL010")
    p.add_argument("--resolution", type=int, default=201, help="grid points per axis")
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser(
        "boundary",
        help="criterion transition radii along rays of a slice",
        formatter_class=_FORMATTER,
    )
    p.add_argument("--family", required=True, help="slice family, e.g. NL000+NL010")
    p.add_argument("--rays", type=int, default=100, help="number of rays in [0, pi/2]")
    p.add_argument("--tol", type=float, default=1e-8, help="bisection tolerance")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_boundary)

    p = subs.add_parser(
        "merge",
        help="compare quantumness and information-causality boundary radii",
        formatter_class=_FORMATTER,
    )
    p.add_argument("--family", required=True, help="slice family, e.g. NL000+NL010")
    p.add_argument("--rays", type=int, default=100, help="number of rays in [0, pi/2]")
    p.add_argument("--tol", type=float, default=1e-8, help="bisection tolerance")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (default: stdout summary only)")
    p.set_defaults(func=cmd_merge)

    p = subs.add_parser(
        "game",
        help="run the index-guessing game on a box",
        formatter_class=_FORMATTER,
    )
    _add_box_args(p)
    p.add_argument("--n", type=int, default=2, help="protocol depth (N = 2^n bits)")
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_game)

    p = subs.add_parser(
        "scan",
        help="smallest protocol depth that certifies an information excess",
        formatter_class=_FORMATTER,
    )
    _add_box_args(p)
    p.add_argument("--n-max", type=int, default=14, help="largest depth to try")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_scan)

    p = subs.add_parser(
        "verify",
        help="run randomized self-check suites",
        formatter_class=_FORMATTER,
    )
    p.add_argument(
        "--suite",
        action="append",
        help="suite name (repeatable; default: all). "
        f"Available: {', '.join(sorted(verify.SUITES))}",
    )
    p.add_argument("--samples", type=int, help="override per-suite sample count")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(parser, args)


if __name__ == "__main__":
    sys.exit(main())
