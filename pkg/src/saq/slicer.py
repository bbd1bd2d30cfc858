"""Slices through the classes: nearest feet of perpendiculars from a chart
point and the canonical class representative they define.
"""

from dataclasses import dataclass, field, replace
import zlib

import numpy as np

from . import kernels
from .errors import (
    Ambiguous,
    InequalityBoundary,
    NoConvergence,
    NotCovered,
    PerpendicularityError,
    RankDeficiencyError,
)
from .relation import focal_report, tangent_frame

__all__ = [
    "SolverConfig",
    "FootResult",
    "in_slice",
    "nearest_foot",
    "all_feet",
    "representative",
    "solve_rng",
]


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and multistart settings for foot solves.

    ``gap_rel`` and ``cluster_radius`` are relative: two feet are distinct
    when they differ by more than ``cluster_radius * (1 + |y|)``, and the best
    foot is isolated when the runner-up is farther by ``gap_rel * (1 + d)``.
    """

    starts: int = 8
    spread: float = 1.0
    tol_foot: float = 1e-9
    tol_rep: float = 1e-7
    gap_rel: float = 1e-6
    cluster_radius: float = 1e-6
    focal_tol: float = 1e-6
    kkt_tol: float = 1e-12
    max_iter: int = 100
    seed: int = 0

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class FootResult:
    y_star: np.ndarray
    lam: np.ndarray
    residual: float
    distance: float
    regular: bool = False
    global_min: bool = False
    iterations: int = 0
    sigma_min: float = field(default=float("nan"), repr=False)
    ambiguous_with: object = field(default=None, repr=False)

    def as_dict(self):
        return {
            "y_star": [float(v) for v in self.y_star],
            "lambda": [float(v) for v in self.lam],
            "residual": float(self.residual),
            "distance": float(self.distance),
            "regular": bool(self.regular),
            "global_min": bool(self.global_min),
            "iterations": int(self.iterations),
        }


def _vec(v, n, what):
    from .errors import DimensionError

    a = np.array([float(t) for t in v], dtype=np.float64)
    if a.shape != (n,):
        raise DimensionError(f"{what} must have length {n}, got {len(a)}")
    return a


def solve_rng(seed, x, p):
    """Generator keyed on (seed, x, p) only, so a solve does not depend on
    where it sits in a batch or which thread runs it."""
    key = [
        int(seed) & 0xFFFFFFFF,
        zlib.crc32(np.ascontiguousarray(p, dtype=np.float64).tobytes()),
        zlib.crc32(np.ascontiguousarray(x, dtype=np.float64).tobytes()),
    ]
    return np.random.default_rng(np.random.SeedSequence(key))


def in_slice(rel, p, x, tol=1e-7, focal_tol=1e-6):
    """``x`` is a regular foot of the perpendicular from ``p`` to its own class."""
    x = _vec(x, rel.n, "x")
    p = _vec(p, rel.n, "p")
    frame = tangent_frame(rel, x, x)
    v = p - x
    resid = float(np.linalg.norm(frame.basis @ v)) if len(frame.basis) else 0.0
    if resid > tol * max(1.0, float(np.linalg.norm(v))):
        return False
    try:
        return focal_report(rel, x, x, p, focal_tol, perp_tol=np.inf).regular
    except RankDeficiencyError:
        return False


def _starts(rel, x, p, cfg, rng):
    n, k = rel.n, rel.k
    sys = rel.system
    yield x.copy()
    y, gn, _ = kernels.project(sys, n, k, x, p)
    if gn <= 1e-10:
        yield y
    scale = cfg.spread * max(1.0, float(np.linalg.norm(p - x)), float(np.linalg.norm(x)))
    for _ in range(cfg.starts):
        t = rng.uniform()
        y0 = x + t * (p - x) + scale * rng.standard_normal(n)
        y, gn, _ = kernels.project(sys, n, k, x, y0)
        if gn <= 1e-10:
            yield y


def _refine(rel, x, p, y0, cfg):
    """One KKT solve; returns a FootResult or None if it did not converge."""
    y, mu, f, it = kernels.kkt_solve(rel.system, rel.n, rel.k, x, y0, p, cfg.max_iter, cfg.kkt_tol)
    if not (np.all(np.isfinite(y)) and f <= 1e3 * cfg.kkt_tol * (1.0 + float(np.linalg.norm(p)))):
        return None
    try:
        frame = tangent_frame(rel, x, y)
    except RankDeficiencyError:
        return None
    v = p - y
    resid = float(np.linalg.norm(frame.basis @ v)) if len(frame.basis) else 0.0
    dist = float(np.linalg.norm(v))
    if resid > cfg.tol_foot * max(1.0, dist):
        return None
    return FootResult(y, np.asarray(mu, dtype=np.float64), resid, dist, iterations=int(it))


def _admissible(rel, x, y):
    if np.any(rel.ineq_values(x, y) <= 0):
        return False
    return rel.in_domain(y, 1e-9)


def _cluster(feet, cfg):
    kept = []
    for f in sorted(feet, key=lambda f: f.distance):
        if all(np.linalg.norm(f.y_star - g.y_star) > cfg.cluster_radius * (1 + np.linalg.norm(g.y_star))
               for g in kept):
            kept.append(f)
    return kept


def _mark_regular(rel, x, p, foot, cfg):
    try:
        rep = focal_report(rel, x, foot.y_star, p, cfg.focal_tol, perp_tol=np.inf)
        foot.regular = rep.regular
        foot.sigma_min = rep.sigma_min / rep.sigma_max if rep.sigma_max > 0 else 0.0
    except (RankDeficiencyError, PerpendicularityError):
        foot.regular = False
    return foot


def _sweep(rel, x, p, cfg):
    rng = solve_rng(cfg.seed, x, p)
    good, rejected = [], []
    for y0 in _starts(rel, x, p, cfg, rng):
        foot = _refine(rel, x, p, y0, cfg)
        if foot is None:
            continue
        (good if _admissible(rel, x, foot.y_star) else rejected).append(foot)
    return _cluster(good, cfg), rejected


def all_feet(rel, x, p, budget=None, cfg=None):
    """Every distinct perpendicular foot found by a multistart sweep, nearest
    first.  ``budget`` overrides the number of random starts."""
    cfg = cfg or SolverConfig()
    if budget is not None:
        cfg = replace(cfg, starts=int(budget))
    x = _vec(x, rel.n, "x")
    p = _vec(p, rel.n, "p")
    feet, _ = _sweep(rel, x, p, cfg)
    for f in feet:
        _mark_regular(rel, x, p, f, cfg)
    _mark_global(feet, cfg)
    return feet


def _mark_global(feet, cfg):
    if not feet:
        return
    best = feet[0]
    best.global_min = len(feet) == 1 or (
        feet[1].distance - best.distance > cfg.gap_rel * (1.0 + best.distance)
    )


def nearest_foot(rel, x, p, cfg=None):
    """Nearest perpendicular foot from ``p`` on the class of ``x``."""
    cfg = cfg or SolverConfig()
    x = _vec(x, rel.n, "x")
    p = _vec(p, rel.n, "p")
    feet, rejected = _sweep(rel, x, p, cfg)
    if not feet:
        if rejected:
            w = min(rejected, key=lambda f: f.distance)
            raise InequalityBoundary(
                "every stationary point found leaves the open class", witness=w.y_star.tolist()
            )
        raise NoConvergence(f"no start converged for x={x.tolist()}, p={p.tolist()}")
    _mark_global(feet, cfg)
    best = feet[0]
    _mark_regular(rel, x, p, best, cfg)
    if not best.global_min:
        best.ambiguous_with = feet[1]
    return best


def _chart_parts(chart):
    p = getattr(chart, "p", chart)
    cfg = getattr(chart, "solver", None)
    return [float(v) for v in p], cfg


def representative(rel, x, chart, cfg=None):
    """Chart coordinate of the class of ``x``: its regular, isolated nearest
    foot from the chart point.  ``chart`` is a Chart or a bare point."""
    p, chart_cfg = _chart_parts(chart)
    cfg = cfg or chart_cfg or SolverConfig()
    try:
        foot = nearest_foot(rel, x, p, cfg)
    except InequalityBoundary as exc:
        raise NotCovered(f"class leaves its open region toward the chart point: {exc}", "boundary") from None
    except NoConvergence as exc:
        raise NotCovered(str(exc), "no_convergence") from None
    if not foot.regular:
        raise NotCovered(f"chart point is focal for the class at {foot.y_star.tolist()}", "focal")
    if not foot.global_min:
        other = foot.ambiguous_with
        raise Ambiguous(
            f"two nearest feet within the gap: {foot.distance:.12g} and {other.distance:.12g}",
            [foot.y_star.tolist(), other.y_star.tolist()],
        )
    return foot.y_star
