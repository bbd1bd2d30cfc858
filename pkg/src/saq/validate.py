"""Seeded spot checks of the hypotheses a relation file must satisfy.

Nothing here is a proof: equivalence axioms, submersivity and closedness are
tested at lattice and random points and every failure is reported with the
point that exhibits it.
"""

from dataclasses import dataclass, field
import itertools

import numpy as np

from . import kernels
from .errors import InequalityBoundary, NoConvergence, RankDeficiencyError
from .relation import class_membership, _split
from .slicer import SolverConfig, nearest_foot

__all__ = ["ValidationReport", "validate_relation", "sample_domain"]

CHECKS = ("reflexivity", "symmetry", "transitivity", "submersivity", "closedness")
MAX_WITNESSES = 20


@dataclass
class ValidationReport:
    relation_hash: str
    seed: int
    samples: int
    tol: float
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def failed(self, name):
        return [v for v in self.violations if v["check"] == name]

    def as_dict(self):
        return {
            "relation_hash": self.relation_hash,
            "seed": self.seed,
            "samples": self.samples,
            "tol": self.tol,
            "ok": self.ok,
            "checks": self.checks,
            "violations": self.violations,
        }


def sample_domain(rel, count, rng, box=5.0, max_tries=None):
    """``count`` uniform points of ``[-box, box]^n`` that lie in the domain."""
    out = []
    tries = 0
    max_tries = max_tries or 200 * max(count, 1)
    while len(out) < count and tries < max_tries:
        tries += 1
        x = rng.uniform(-box, box, rel.n)
        if rel.in_domain(x):
            out.append(x)
    return out


def _lattice(rel, radius=2):
    pts = (np.array(c, dtype=np.float64) for c in itertools.product(range(-radius, radius + 1), repeat=rel.n))
    return [x for x in pts if rel.in_domain(x)]


def _scale(*vs):
    return 1.0 + sum(float(v @ v) for v in vs)


def _class_points(rel, x, rng, count, spread):
    """Points of the class of ``x`` reached by projecting random starts."""
    pts = []
    for _ in range(count):
        y0 = x + spread * rng.standard_normal(rel.n)
        y, gn, _ = kernels.project(rel.system, rel.n, rel.k, x, y0)
        if gn <= 1e-10 and np.all(rel.ineq_values(x, y) > 0) and rel.in_domain(y, 1e-9):
            pts.append(y)
    return pts


def _boundary_points(rel, x, y, rng, tries=3):
    """Gauss-Newton solutions of ``g(x, .) = 0, h_i(x, .) = 0`` near ``y``."""
    n = rel.n
    found = []
    for h in rel.class_ineqs:
        polys = list(rel.class_eqs) + [h]
        packed = kernels.pack_polys(polys + [q.differentiate(n + i) for q in polys for i in range(n)])
        m = len(polys)
        for t in range(tries):
            z = y + (0.0 if t == 0 else 0.5) * rng.standard_normal(n)
            for _ in range(60):
                vals = kernels.eval_polys(packed, np.concatenate([x, z]))
                F = vals[:m]
                if np.linalg.norm(F) < 1e-12:
                    break
                J = vals[m:].reshape(m, n)
                step, *_ = np.linalg.lstsq(J, F, rcond=None)
                z = z - step
                if not np.all(np.isfinite(z)):
                    break
            else:
                continue
            if np.all(np.isfinite(z)) and np.linalg.norm(F) < 1e-10:
                found.append(z)
    return found


def _approached(rel, x, b, rng, tol):
    """Is ``b`` a limit of class points (g = 0 with every ineq positive)?"""
    for eps in (1e-3, 1e-4, 1e-5):
        for _ in range(8):
            y0 = b + eps * rng.standard_normal(rel.n)
            y, gn, _ = kernels.project(rel.system, rel.n, rel.k, x, y0)
            if gn <= 1e-10 and np.linalg.norm(y - b) < 10 * eps and np.all(rel.ineq_values(x, y) > 0):
                break
        else:
            return False
    return True


def validate_relation(rel, sample_count=50, seed=0, tol=1e-8, box=5.0):
    """Spot-check reflexivity, symmetry, transitivity, submersivity and
    closedness at lattice points of ``{-2..2}^n`` and seeded random points."""
    rng = np.random.default_rng(seed)
    report = ValidationReport(rel.hash, seed, sample_count, tol)
    counts = {name: 0 for name in CHECKS}
    bad = {name: 0 for name in CHECKS}

    def violate(name, **detail):
        bad[name] += 1
        if len(report.failed(name)) < MAX_WITNESSES:
            entry = {"check": name}
            entry.update({k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in detail.items()})
            report.violations.append(entry)

    points = _lattice(rel) + sample_domain(rel, sample_count, rng, box)
    cfg = SolverConfig(seed=seed, starts=4)
    for x in points:
        counts["reflexivity"] += 1
        gx = rel.g_values(x, x)
        hx = rel.ineq_values(x, x)
        if np.any(np.abs(gx) > tol * _scale(x)) or np.any(hx <= 0):
            violate("reflexivity", x=x, g=gx.tolist(), ineqs=hx.tolist())
            continue

        counts["submersivity"] += 1
        try:
            _split(rel, x, x)
        except RankDeficiencyError as exc:
            violate("submersivity", x=x, y=x, rank=exc.rank)
            continue

        spread = max(1.0, float(np.linalg.norm(x)))
        ys = _class_points(rel, x, rng, 3, spread)
        for y in ys:
            counts["submersivity"] += 1
            try:
                _split(rel, x, y)
            except RankDeficiencyError as exc:
                violate("submersivity", x=x, y=y, rank=exc.rank)
            counts["symmetry"] += 1
            if not class_membership(rel, y, x, tol * _scale(x, y)):
                violate("symmetry", x=x, y=y, g=rel.g_values(y, x).tolist())

        if ys:
            y = ys[0]
            q = rng.uniform(-box, box, rel.n)
            try:
                z = nearest_foot(rel, y, q, cfg).y_star
            except (NoConvergence, InequalityBoundary, RankDeficiencyError):
                z = None
            if z is not None:
                counts["transitivity"] += 1
                if not class_membership(rel, x, z, 1e3 * tol * _scale(x, z)):
                    violate("transitivity", x=x, y=y, z=z, g=rel.g_values(x, z).tolist())

            if rel.class_ineqs:
                counts["closedness"] += 1
                for b in _boundary_points(rel, x, y, rng):
                    if rel.in_domain(b, 1e-9, 1e-8) and _approached(rel, x, b, rng, tol):
                        violate("closedness", x=x, limit=b, ineqs=rel.ineq_values(x, b).tolist())
                        break

    report.checks = {name: {"checked": counts[name], "violations": bad[name]} for name in CHECKS}
    return report
