"""``saq`` command line: validate, complexity, avoid, atlas, rep, cover, plot."""

import argparse
from fractions import Fraction
import json
import os
import sys

from .atlas import (
    AtlasConfig,
    atlas_to_json,
    build_atlas,
    coverage,
    default_degree,
    draw_samples,
    load_atlas,
    plot,
)
from .avoidance import avoidance_set
from .complexity import cpl_report, degree_bound
from .errors import BudgetError, IncompleteCoverage, SaqError
from .relation import corpus_path, load_relation_file
from .sets import parse_set
from .slicer import SolverConfig, all_feet, nearest_foot
from .validate import validate_relation

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _default_seed():
    env = os.environ.get("SAQ_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SAQ_SEED must be an integer, got {env!r}") from None


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _csv(text):
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _box(text):
    """``lo:hi`` for every coordinate, or ``lo:hi,lo:hi,...`` per coordinate."""
    try:
        parts = [tuple(Fraction(v) for v in chunk.split(":")) for chunk in text.split(",")]
    except (ValueError, ZeroDivisionError):
        parts = None
    if not parts or any(len(p) != 2 or p[0] >= p[1] for p in parts):
        raise argparse.ArgumentTypeError(f"expected lo:hi[,lo:hi...], got {text!r}")
    return parts


def _resolve_box(parts, n):
    if parts is None:
        return None
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        raise UsageError(f"--region needs 1 or {n} intervals")
    return tuple(p[0] for p in parts), tuple(p[1] for p in parts)


def _load(path):
    if not os.path.exists(path):
        bundled = corpus_path(os.path.basename(path))
        if os.path.exists(bundled):
            return load_relation_file(bundled)
    return load_relation_file(path)


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _note(msg):
    sys.stderr.write(msg + "\n")


# -- subcommands -------------------------------------------------------------------

def cmd_validate(args):
    rel = _load(args.file)
    report = validate_relation(rel, args.samples, args.seed, args.tol)
    if args.json:
        _emit(report.as_dict())
    else:
        for name, c in report.checks.items():
            sys.stdout.write(f"{name:<14}{c['checked']:>6} checked {c['violations']:>5} violations\n")
    for v in report.violations:
        _note("violation: " + json.dumps(v))
    return 0 if report.ok else 1


def cmd_complexity(args):
    if args.set is not None:
        report = cpl_report(parse_set(args.set))
        out = report.as_dict()
    else:
        rel = _load(args.file)
        report = cpl_report(rel.as_set())
        out = report.as_dict()
        out["atlas_degree"] = default_degree(rel, AtlasConfig())
    try:
        out["degree_bound"] = degree_bound(report.value).value
    except BudgetError:
        out["degree_bound"] = None
    if args.json:
        _emit(out)
    else:
        for key, val in out.items():
            sys.stdout.write(f"{key:<14}{val}\n")
    return 0


def cmd_avoid(args):
    s = avoidance_set(args.n, args.d, seed=args.seed, height=args.height)
    out = {
        "n": s.n,
        "d": s.d,
        "seed": args.seed,
        "points": [[f"{v.numerator}/{v.denominator}" for v in pt] for pt in s.points],
        "certificate": s.certificate.as_dict(),
    }
    _emit(out)
    return 0


def cmd_atlas(args):
    rel = _load(args.file)
    report = validate_relation(rel, args.validate_samples, args.seed)
    if not report.ok:
        for v in report.violations:
            _note("violation: " + json.dumps(v))
        _note("relation failed validation; no atlas built")
        return 1
    cfg = AtlasConfig(
        box=_resolve_box(args.region, rel.n),
        region=args.where,
        samples=args.samples,
        seed=args.seed,
        degree=args.degree,
        full_degree=args.full_degree,
        max_charts=args.max_charts,
        threads=args.threads,
    )
    code = 0
    try:
        atlas = build_atlas(rel, cfg, report)
    except IncompleteCoverage as exc:
        atlas = exc.atlas
        _note(str(exc))
        code = 1
    text = atlas_to_json(atlas)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        _note(f"{len(atlas.charts)} charts, coverage {atlas.coverage.covered}/{atlas.coverage.samples}")
    else:
        sys.stdout.write(text)
    return code


def cmd_rep(args):
    rel = _load(args.file)
    cfg = SolverConfig(seed=args.seed)
    if args.all_feet:
        feet = all_feet(rel, args.point, args.chart_point, cfg=cfg)
        if not feet:
            _note("no foot converged")
            return 1
    else:
        feet = [nearest_foot(rel, args.point, args.chart_point, cfg)]
    for f in feet:
        sys.stdout.write(json.dumps(f.as_dict()) + "\n")
    return 0


def cmd_cover(args):
    atlas = load_atlas(args.atlas)
    rel = _load(args.file)
    if rel.hash != atlas.rel.hash:
        _note("atlas was built for a different relation")
        return 1
    cfg = atlas.config
    samples = draw_samples(rel, AtlasConfig(
        box=cfg.box, region=cfg.region, seed=args.seed, samples=args.samples or cfg.samples
    ))
    report = coverage(atlas, samples, args.threads)
    if args.json:
        _emit(report.as_dict())
    else:
        sys.stdout.write(f"covered {report.covered}/{report.samples} ({float(report.fraction):.4f})\n")
        for w in report.witnesses:
            _note("uncovered: " + json.dumps(w))
    return 0 if report.covered == report.samples else 1


def cmd_plot(args):
    atlas = load_atlas(args.atlas)
    plot(atlas, args.output)
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser():
    seed = _default_seed()
    parser = argparse.ArgumentParser(
        prog="saq", description="Slice atlases for semi-algebraic equivalence relations."
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, help_text, fn):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--seed", type=int, default=seed, help=f"random seed (default {seed}; SAQ_SEED overrides)")
        return p

    p = add("validate", "spot-check the equivalence-relation hypotheses of a relation file", cmd_validate)
    p.add_argument("file")
    p.add_argument("--samples", type=_positive_int, default=50)
    p.add_argument("--tol", type=_positive_float, default=1e-8)

    p = add("complexity", "complexity report of a relation file or a set", cmd_complexity)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("file", nargs="?")
    g.add_argument("--set", help="set in DNF text form")

    p = add("avoid", "certified point set avoiding every degree-d hypersurface", cmd_avoid)
    p.add_argument("-n", type=_positive_int, required=True, help="dimension")
    p.add_argument("-d", type=int, required=True, help="degree")
    p.add_argument("--height", type=_positive_int, default=16)

    p = add("atlas", "build a chart atlas for a relation file", cmd_atlas)
    p.add_argument("file")
    p.add_argument("--region", type=_box, help="sample box as lo:hi or lo:hi,lo:hi,... (use --region=...)")
    p.add_argument("--where", help="extra region constraint as a set in x1..xn")
    p.add_argument("--samples", type=_positive_int, default=500)
    p.add_argument("--degree", type=int, help="avoidance degree override")
    p.add_argument("--full-degree", action="store_true", help="use N^N without the practical cap")
    p.add_argument("--max-charts", type=_positive_int)
    p.add_argument("--validate-samples", type=_positive_int, default=20)
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("-o", "--output")

    p = add("rep", "nearest foot (class representative) from a chart point", cmd_rep)
    p.add_argument("file")
    p.add_argument("--point", type=_csv, required=True)
    p.add_argument("--chart-point", type=_csv, required=True)
    p.add_argument("--all-feet", action="store_true")

    p = add("cover", "coverage of fresh samples by an existing atlas", cmd_cover)
    p.add_argument("file")
    p.add_argument("atlas")
    p.add_argument("--samples", type=_positive_int)
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)

    p = add("plot", "SVG picture of a planar atlas", cmd_plot)
    p.add_argument("atlas")
    p.add_argument("-o", "--output", required=True)
    return parser


def main(argv=None):
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except UsageError as exc:
        _note(f"saq: {exc}")
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        _note(f"saq: {exc}")
        return 2
    except (OSError, ValueError) as exc:
        # ParseError and DimensionError are ValueErrors: bad input, not a domain failure
        _note(f"saq: {exc}")
        return 2
    except SaqError as exc:
        _note(f"saq: {type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
