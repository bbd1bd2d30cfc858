"""Finite point sets in general position for polynomials of bounded degree.

A set escapes every hypersurface of degree ``<= d`` exactly when evaluation
at its points separates the space of degree-``<= d`` polynomials, i.e. the
monomial evaluation matrix has full column rank.  That rank is certified
here with exact fraction-free elimination.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm

import numpy as np

from .errors import BudgetError

__all__ = [
    "RankReport",
    "AvoidanceSet",
    "monomial_basis",
    "evaluation_matrix",
    "bareiss_rank",
    "certify_general_position",
    "avoidance_set",
    "moment_curve_set",
]


def monomial_basis(n, d):
    """Exponent tuples of total degree ``<= d``: graded, lex-descending within
    a degree."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    return [e for deg in range(d + 1) for e in compositions(deg, n)]


def evaluation_matrix(points, d):
    """Integer matrix whose row ``i`` is a positive multiple of the monomial
    values at ``points[i]`` (rows are cleared of denominators)."""
    points = [[Fraction(v) for v in pt] for pt in points]
    n = len(points[0])
    basis = monomial_basis(n, d)
    rows = []
    for pt in points:
        den = lcm(*(v.denominator for v in pt))
        nums = [int(v * den) for v in pt]
        row = []
        for e in basis:
            t = den ** (d - sum(e))
            for a, k in zip(nums, e):
                if k:
                    t *= a ** k
            row.append(t)
        rows.append(row)
    return rows


def bareiss_rank(rows):
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in rows]
    m = len(M)
    c = len(M[0]) if M else 0
    rank = 0
    prev = 1
    for col in range(c):
        if rank == m:
            break
        piv = next((r for r in range(rank, m) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][col]
        for r in range(rank + 1, m):
            a = M[r][col]
            row_r = M[r]
            row_p = M[rank]
            for cc in range(col + 1, c):
                q, rem = divmod(row_r[cc] * p - a * row_p[cc], prev)
                if rem:
                    raise ArithmeticError("inexact Bareiss division")
                row_r[cc] = q
            row_r[col] = 0
        prev = p
        rank += 1
    return rank


@dataclass(frozen=True)
class RankReport:
    rank: int
    rows: int
    columns: int

    @property
    def full_column_rank(self):
        return self.rank == self.columns

    def as_dict(self):
        return {
            "rank": self.rank,
            "rows": self.rows,
            "columns": self.columns,
            "full_column_rank": self.full_column_rank,
        }


def certify_general_position(points, d):
    """``(ok, report)``: ok iff no nonzero polynomial of degree ``<= d``
    vanishes on all of ``points``."""
    rows = evaluation_matrix(points, d)
    report = RankReport(bareiss_rank(rows), len(rows), len(rows[0]))
    return report.full_column_rank, report


@dataclass(frozen=True)
class AvoidanceSet:
    n: int
    d: int
    points: tuple
    certificate: RankReport
    seed: object = None
    attempts: int = field(default=1, compare=False)

    def scaled(self, lo, hi, height):
        """Affine image of the points from ``[-height, height]^n`` onto the box
        ``[lo, hi]``.  Affine bijections preserve general position."""
        lo = [Fraction(v) for v in lo]
        hi = [Fraction(v) for v in hi]
        out = []
        for pt in self.points:
            out.append(tuple(
                l + (h - l) * (v + height) / (2 * height) for v, l, h in zip(pt, lo, hi)
            ))
        return out


def avoidance_set(n, d, seed=0, height=16, max_tries=64):
    """Draw ``C(n + d, d)`` seeded rational points and certify them.

    Coordinates are ``a / b`` with ``|a| <= height`` and ``1 <= b <= height``.
    Fresh draws are taken until the rank certificate passes.
    """
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    count = comb(n + d, d)
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_tries + 1):
        nums = rng.integers(-height, height + 1, size=(count, n))
        dens = rng.integers(1, height + 1, size=(count, n))
        points = tuple(
            tuple(Fraction(int(a), int(b)) for a, b in zip(rn, rd)) for rn, rd in zip(nums, dens)
        )
        ok, report = certify_general_position(points, d)
        if ok:
            return AvoidanceSet(n, d, points, report, seed, attempt)
    raise BudgetError(f"no certified set after {max_tries} draws for n={n}, d={d}")


def moment_curve_set(d):
    """Deterministic set for ``n = 1``: the integers ``0..d``."""
    points = tuple((Fraction(t),) for t in range(d + 1))
    ok, report = certify_general_position(points, d)
    assert ok
    return AvoidanceSet(1, d, points, report, None)
