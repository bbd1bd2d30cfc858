"""Finite atlases of slice charts.

Chart points are drawn from a certified avoidance set scaled into the
sample box.  Each candidate's saturation is estimated on seeded samples by
attempting a representative, and a greedy cover picks the charts.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
import json
import math

import numpy as np

from .avoidance import avoidance_set, certify_general_position
from .complexity import degree_bound
from .errors import (
    Ambiguous,
    DimensionError,
    IncompleteCoverage,
    NotCovered,
    RankDeficiencyError,
    ValidationRequired,
)
from .relation import load_relation
from .sets import SemialgSet, parse_set, serialize_set
from .slicer import SolverConfig, representative

__all__ = [
    "Chart",
    "AtlasConfig",
    "CoverageReport",
    "Atlas",
    "build_atlas",
    "coverage",
    "transition",
    "default_degree",
    "export_atlas",
    "atlas_to_json",
    "load_atlas",
    "plot",
    "svg_text",
]

DEGREE_CAP = 6


@dataclass(frozen=True)
class Chart:
    id: int
    p: tuple  # Fractions
    solver: SolverConfig = field(default_factory=SolverConfig, compare=False)
    candidate: int = -1

    @property
    def point(self):
        return np.array([float(v) for v in self.p])


@dataclass(frozen=True)
class AtlasConfig:
    """``box`` is ``(lo, hi)``; ``region`` an optional set text in x1..xn
    that samples must also satisfy.  ``threads`` only affects speed."""

    box: tuple = None
    region: str = None
    samples: int = 500
    seed: int = 0
    degree: int = None
    full_degree: bool = False
    degree_cap: int = DEGREE_CAP
    height: int = 16
    max_charts: int = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    threads: int = 1

    def resolved_box(self, n):
        if self.box is None:
            return (tuple([-5] * n), tuple([5] * n))
        lo, hi = self.box
        if len(lo) != n or len(hi) != n:
            raise DimensionError(f"box must have {n} coordinates per corner")
        return tuple(lo), tuple(hi)

    def as_dict(self, n):
        lo, hi = self.resolved_box(n)
        return {
            "box": {"lo": [_fmt_q(v) for v in lo], "hi": [_fmt_q(v) for v in hi]},
            "region": self.region,
            "samples": self.samples,
            "degree": self.degree,
            "full_degree": self.full_degree,
            "degree_cap": self.degree_cap,
            "height": self.height,
            "max_charts": self.max_charts,
            "solver": self.solver.as_dict(),
        }


@dataclass
class CoverageReport:
    samples: int
    covered: int
    witnesses: list = field(default_factory=list)

    @property
    def fraction(self):
        return Fraction(self.covered, self.samples) if self.samples else Fraction(1)

    def as_dict(self):
        return {
            "samples": self.samples,
            "covered": self.covered,
            "fraction": _fmt_q(self.fraction),
            "witnesses": self.witnesses,
        }


@dataclass
class Atlas:
    rel: object
    charts: list
    coverage: CoverageReport
    seed: int
    degree: int
    candidate_count: int
    config: AtlasConfig

    def chart(self, i):
        for c in self.charts:
            if c.id == i:
                return c
        raise KeyError(f"no chart with id {i}")

    def to_dict(self):
        return {
            "relation_hash": self.rel.hash,
            "seed": self.seed,
            "relation": self.rel.to_text(),
            "charts": [
                {"id": c.id, "p": [_fmt_q(v) for v in c.p], "candidate": c.candidate} for c in self.charts
            ],
            "coverage": self.coverage.as_dict(),
            "provenance": {"degree": self.degree, "candidates": self.candidate_count},
            "config": self.config.as_dict(self.rel.n),
        }

    def __eq__(self, other):
        return isinstance(other, Atlas) and self.to_dict() == other.to_dict()


def _fmt_q(v):
    q = Fraction(v)
    return f"{q.numerator}/{q.denominator}"


def _parse_q(s):
    return Fraction(s)


# -- building ------------------------------------------------------------------

def default_degree(rel, cfg):
    if cfg.degree is not None:
        return int(cfg.degree)
    N = rel.complexity.value
    if cfg.full_degree:
        return degree_bound(N).value
    return N ** N if N <= 2 else min(N ** N, cfg.degree_cap)


def _region(rel, cfg):
    if cfg.region is None:
        return None
    return parse_set(cfg.region, var_names=[f"x{i + 1}" for i in range(rel.n)])


def draw_samples(rel, cfg, count=None):
    """Seeded uniform samples of the box inside the domain and the region."""
    count = cfg.samples if count is None else count
    lo, hi = cfg.resolved_box(rel.n)
    lo = np.array([float(v) for v in lo])
    hi = np.array([float(v) for v in hi])
    region = _region(rel, cfg)
    rng = np.random.default_rng(cfg.seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 1000 * max(count, 1):
            raise ValueError("sample region is (numerically) empty")
        x = lo + (hi - lo) * rng.uniform(size=rel.n)
        if rel.in_domain(x) and (region is None or region.contains(list(x))):
            out.append(x)
    return out


def _attempt(rel, x, chart):
    try:
        return representative(rel, x, chart), None
    except (NotCovered, Ambiguous) as exc:
        return None, exc.reason
    except RankDeficiencyError:
        return None, "rank"


def _rows(rel, samples, charts, threads):
    def row(x):
        return [_attempt(rel, x, c) for c in charts]

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(row, samples))
    return [row(x) for x in samples]


def _greedy(success, max_charts):
    """Largest marginal gain first, ties to the lowest index."""
    M, C = success.shape
    covered = np.zeros(M, dtype=bool)
    chosen = []
    while not covered.all() and (max_charts is None or len(chosen) < max_charts):
        gains = (success & ~covered[:, None]).sum(axis=0)
        j = int(np.argmax(gains))
        if gains[j] == 0:
            break
        chosen.append(j)
        covered |= success[:, j]
    return chosen


def _report(samples, rows, charts):
    covered = 0
    witnesses = []
    for x, row in zip(samples, rows):
        if any(res is not None for res, _ in row):
            covered += 1
        else:
            witnesses.append({
                "point": [float(v) for v in x],
                "reasons": {str(c.id): reason for c, (_, reason) in zip(charts, row)},
            })
    return CoverageReport(len(samples), covered, witnesses)


def build_atlas(rel, cfg=None, validation=None):
    """Choose chart points covering the sampled domain.

    ``validation`` must be a passing report for this relation.  Raises
    :class:`IncompleteCoverage` (carrying the partial atlas) when samples
    remain uncovered.
    """
    cfg = cfg or AtlasConfig()
    if validation is None or validation.relation_hash != rel.hash:
        raise ValidationRequired("validate the relation before building an atlas")
    if not validation.ok:
        raise ValidationRequired("the relation failed validation")
    d = default_degree(rel, cfg)
    lo, hi = cfg.resolved_box(rel.n)
    base = avoidance_set(rel.n, d, seed=cfg.seed, height=cfg.height)
    points = base.scaled(lo, hi, cfg.height)
    ok, _ = certify_general_position(points, d)
    if not ok:  # an affine bijection cannot break general position
        raise ArithmeticError("scaled avoidance set lost its certificate")
    candidates = [Chart(j, tuple(p), cfg.solver, j) for j, p in enumerate(points)]

    samples = draw_samples(rel, cfg)
    rows = _rows(rel, samples, candidates, cfg.threads)
    success = np.array([[res is not None for res, _ in row] for row in rows], dtype=bool).reshape(
        len(samples), len(candidates)
    )
    chosen = _greedy(success, cfg.max_charts)
    charts = [Chart(i, candidates[j].p, cfg.solver, j) for i, j in enumerate(chosen)]
    picked = [[row[j] for j in chosen] for row in rows]
    report = _report(samples, picked, charts)
    atlas = Atlas(rel, charts, report, cfg.seed, d, len(candidates), cfg)
    if report.covered < report.samples:
        raise IncompleteCoverage(atlas)
    return atlas


def coverage(atlas, samples, threads=1):
    samples = [np.asarray(x, dtype=np.float64) for x in samples]
    rows = _rows(atlas.rel, samples, atlas.charts, threads)
    return _report(samples, rows, atlas.charts)


def transition(atlas, i, j, y):
    """Coordinate of the class of ``y`` in chart ``j``; ``y`` is a chart-``i``
    representative."""
    atlas.chart(i)
    return representative(atlas.rel, y, atlas.chart(j))


# -- serialization ---------------------------------------------------------------

def atlas_to_json(atlas):
    return json.dumps(atlas.to_dict(), indent=2) + "\n"


def export_atlas(atlas, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(atlas_to_json(atlas))


def load_atlas(source):
    """Load from a path or a JSON string."""
    if isinstance(source, str) and source.lstrip().startswith("{"):
        data = json.loads(source)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    rel = load_relation(data["relation"])
    if rel.hash != data["relation_hash"]:
        raise ValueError("relation text does not match relation_hash")
    c = data["config"]
    solver = SolverConfig(**c["solver"])
    cfg = AtlasConfig(
        box=(tuple(_parse_q(v) for v in c["box"]["lo"]), tuple(_parse_q(v) for v in c["box"]["hi"])),
        region=c["region"],
        samples=c["samples"],
        seed=data["seed"],
        degree=c["degree"],
        full_degree=c["full_degree"],
        degree_cap=c["degree_cap"],
        height=c["height"],
        max_charts=c["max_charts"],
        solver=solver,
    )
    charts = [
        Chart(ch["id"], tuple(_parse_q(v) for v in ch["p"]), solver, ch.get("candidate", -1))
        for ch in data["charts"]
    ]
    cov = data["coverage"]
    report = CoverageReport(cov["samples"], cov["covered"], cov["witnesses"])
    prov = data.get("provenance", {})
    return Atlas(rel, charts, report, data["seed"], prov.get("degree"), prov.get("candidates"), cfg)


# -- plotting ------------------------------------------------------------------

SVG_SIZE = 600


def _trace_class(rel, x, lo, hi, steps=400):
    """Polyline along the class of ``x`` (one-dimensional classes only)."""
    from . import kernels
    from .relation import tangent_frame

    h = float(np.max(hi - lo)) / 150.0
    start = np.asarray(x, dtype=np.float64)
    branches = []
    for sign in (1.0, -1.0):
        pts = [start]
        y = start
        prev = None
        for s in range(steps):
            try:
                t = tangent_frame(rel, start, y).basis[0]
            except RankDeficiencyError:
                break
            if prev is None:
                t = sign * t
            elif t @ prev < 0:
                t = -t
            y_new, gn, _ = kernels.project(rel.system, rel.n, rel.k, start, y + h * t)
            if gn > 1e-9 or np.any(rel.ineq_values(start, y_new) <= 0) or not rel.in_domain(y_new, 1e-9):
                break
            if np.any(y_new < lo) or np.any(y_new > hi):
                break
            pts.append(y_new)
            prev, y = t, y_new
            if s > 10 and np.linalg.norm(y - start) < h:
                pts.append(start)
                return [pts]
        branches.append(pts)
    return [branches[1][::-1] + branches[0][1:]]


def svg_text(atlas, class_count=8, slice_count=60):
    rel = atlas.rel
    if rel.n != 2:
        raise DimensionError(f"plots need n = 2, got n = {rel.n}")
    lo, hi = atlas.config.resolved_box(2)
    lo = np.array([float(v) for v in lo])
    hi = np.array([float(v) for v in hi])
    span = hi - lo

    def px(v):
        u = (v[0] - lo[0]) / span[0] * SVG_SIZE
        w = (hi[1] - v[1]) / span[1] * SVG_SIZE
        return f"{u:.2f},{w:.2f}"

    seeds = draw_samples(rel, replace(atlas.config, seed=atlas.seed), max(class_count, slice_count))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white" stroke="black"/>',
    ]
    if rel.k == 1:
        for x in seeds[:class_count]:
            for line in _trace_class(rel, x, lo, hi):
                if len(line) > 1:
                    pts = " ".join(px(v) for v in line)
                    out.append(f'<polyline class="class-curve" points="{pts}" fill="none" stroke="#999"/>')
    for c in atlas.charts:
        reps = [r for r, _ in (_attempt(rel, x, c) for x in seeds[:slice_count]) if r is not None]
        if len(reps) >= 2:
            R = np.array(reps)
            centre = R.mean(axis=0)
            _, s, vt = np.linalg.svd(R - centre)
            if s[-1] <= 1e-6 * max(s[0], 1e-300):
                order = np.argsort((R - centre) @ vt[0], kind="stable")
                pts = " ".join(px(R[i]) for i in order)
                out.append(f'<polyline class="slice" data-chart="{c.id}" points="{pts}" fill="none" stroke="blue"/>')
        for r in reps:
            u, w = px(r).split(",")
            out.append(f'<circle class="slice-point" data-chart="{c.id}" cx="{u}" cy="{w}" r="1.5" fill="blue"/>')
    for c in atlas.charts:
        u, w = px(c.point).split(",")
        out.append(f'<circle class="chart" data-chart="{c.id}" cx="{u}" cy="{w}" r="5" fill="red"/>')
    for wit in atlas.coverage.witnesses:
        u, w = px(wit["point"]).split(",")
        out.append(f'<circle class="witness" cx="{u}" cy="{w}" r="3" fill="none" stroke="orange"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot(atlas, path):
    text = svg_text(atlas)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
