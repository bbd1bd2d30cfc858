"""Representation-based complexity and the tame-bound calculus.

``cpl`` reads a complexity bound off a DNF representation: a union of at
most ``N`` pieces, each cut out by at most ``N`` conditions of degree at
most ``N`` in at most ``N`` variables.  The exact set operations below have
matching ``bound_*`` combinators that bound ``cpl`` of the result in terms of
``cpl`` of the inputs without looking at the sets.
"""

from dataclasses import dataclass
from functools import reduce
from itertools import product

from .errors import BudgetError, DimensionError
from .sets import BasicSet, SemialgSet, full_space

__all__ = [
    "ComplexityBound",
    "DegreeBound",
    "ComplexityReport",
    "cpl",
    "cpl_report",
    "union",
    "intersection",
    "complement",
    "affine_preimage",
    "bound_union",
    "bound_intersection",
    "bound_complement",
    "bound_affine_preimage",
    "bound_projection",
    "bound_exists",
    "bound_forall",
    "exists_semi_oracle",
    "degree_bound",
    "PROJECTION_PROFILES",
]


@dataclass(frozen=True, order=True)
class ComplexityBound:
    """``complexity <= value``."""

    value: int

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("complexity bounds are positive")

    def __int__(self):
        return self.value


@dataclass(frozen=True, order=True)
class DegreeBound:
    """Some nonzero polynomial of degree ``<= value`` vanishes on the set."""

    value: int

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("degree bounds are positive")

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class ComplexityReport:
    value: int
    pieces: int
    conditions: int
    nvars: int
    degree: int

    def as_dict(self):
        return {
            "complexity": self.value,
            "pieces": self.pieces,
            "conditions": self.conditions,
            "vars": self.nvars,
            "degree": self.degree,
        }


def _n(b):
    return b.value if isinstance(b, (ComplexityBound, DegreeBound)) else int(b)


def cpl_report(S):
    # the ambient dimension always counts, so an empty union in R^n has
    # complexity n (1 in R^1)
    if not S.pieces:
        return ComplexityReport(max(S.nvars, 1), 0, 0, S.nvars, 0)
    conds = max(len(p.conditions) for p in S.pieces)
    degree = max(p.degree for p in S.pieces)
    value = max(len(S.pieces), conds, S.nvars, degree, 1)
    return ComplexityReport(value, len(S.pieces), conds, S.nvars, degree)


def cpl(S):
    return ComplexityBound(cpl_report(S).value)


# -- exact operations --------------------------------------------------------

def _same_dim(X, Y):
    if X.nvars != Y.nvars:
        raise DimensionError(f"sets live in R^{X.nvars} and R^{Y.nvars}")


def union(X, Y):
    _same_dim(X, Y)
    return SemialgSet(X.nvars, X.pieces + Y.pieces)


def _meet(a, b):
    return BasicSet(a.nvars, a.conditions + b.conditions)


def intersection(X, Y):
    _same_dim(X, Y)
    return SemialgSet(X.nvars, [_meet(a, b) for a, b in product(X.pieces, Y.pieces)])


def _complement_basic(piece):
    # R^n minus {all conditions} = union over conditions of the negated condition
    out = []
    for c in piece.conditions:
        out.extend(BasicSet(piece.nvars, [neg]) for neg in c.negated_pieces())
    return SemialgSet(piece.nvars, out)


def complement(X):
    """Complement as an intersection of per-piece complements, distributed."""
    return reduce(intersection, (_complement_basic(p) for p in X.pieces), full_space(X.nvars))


def affine_preimage(X, A, b):
    """``{y : A y + b in X}`` for a rational ``A`` with ``X.nvars`` rows."""
    if len(A) != X.nvars:
        raise DimensionError(f"affine map must have {X.nvars} rows")
    m = len(A[0])
    cache = {}

    def pull(poly):
        if poly not in cache:
            cache[poly] = poly.substitute_affine(A, b)
        return cache[poly]

    pieces = [
        BasicSet(m, [type(c)(pull(c.poly), c.rel) for c in piece.conditions])
        for piece in X.pieces
    ]
    return SemialgSet(m, pieces)


# -- bound combinators ---------------------------------------------------------

def bound_union(N1, N2):
    # piece counts add; per-piece data is at most max(N1, N2)
    return ComplexityBound(_n(N1) + _n(N2))


def bound_intersection(N1, N2):
    # pairwise meets: N1*N2 pieces of N1+N2 conditions
    a, b = _n(N1), _n(N2)
    return ComplexityBound(max(a * b, a + b))


def bound_complement(N):
    """Bound threaded through the proof: negate, union, then intersect.

    A negated condition is a union of two single-condition pieces, so of
    complexity at most ``2N``; the complement of one piece is a union of at
    most ``N`` of those; the complement of the set intersects at most ``N``
    piece complements.
    """
    N = _n(N)
    negated = 2 * N
    piece = reduce(bound_union, [ComplexityBound(negated)] * N)
    return reduce(bound_intersection, [piece] * (N - 1), piece)


def bound_affine_preimage(N, source_dim=None):
    """Pullbacks keep pieces, conditions and degrees; ``2N`` covers the
    variable count when the source has at most twice the target dimension."""
    N = _n(N)
    bound = 2 * N
    if source_dim is not None:
        bound = max(bound, int(source_dim))
    return ComplexityBound(bound)


# name -> (base factor, exponent base) for  (c1 * N) ** (c2 ** N)
PROJECTION_PROFILES = {
    "doubly_exponential": (2, 2),
    "single_exponential": (2, 1),
}


def bound_projection(N, cfg=None):
    """Monotone bound for images under coordinate projections.

    Only a shape is asserted here.  ``cfg`` is a profile name, a
    ``(c1, c2)`` pair, or a mapping with keys ``profile``/``c1``/``c2``.
    """
    N = _n(N)
    if cfg is None:
        cfg = "doubly_exponential"
    if isinstance(cfg, str):
        c1, c2 = PROJECTION_PROFILES[cfg]
    elif isinstance(cfg, dict):
        c1, c2 = PROJECTION_PROFILES[cfg.get("profile", "doubly_exponential")]
        c1, c2 = cfg.get("c1", c1), cfg.get("c2", c2)
    else:
        c1, c2 = cfg
    if c1 < 1 or c2 < 1:
        raise ValueError("profile constants must be at least 1")
    value = (c1 * N) ** (c2 ** N) if c2 > 1 else (c1 * N) ** N
    return ComplexityBound(max(value, N))


def bound_exists(N, cfg=None):
    """``{x : exists y, (x, y) in T}`` is a projection of ``T``."""
    return bound_projection(N, cfg)


def bound_forall(N, cfg=None):
    """``{x : forall y, (x, y) in T}`` is the complement of the projection of
    the complement of ``T``."""
    return bound_complement(bound_projection(bound_complement(N), cfg))


def exists_semi_oracle(T, x, y_samples, tol=0.0):
    """Return True if some sampled ``y`` puts ``(x, y)`` in ``T``; None otherwise.

    A positive answer is a certificate; a negative one is not, hence None.
    """
    x = list(x)
    for y in y_samples:
        if T.contains(x + list(y), tol):
            return True
    return None


def degree_bound(N, practical=None, ceiling=10 ** 6):
    """Degree of a hypersurface containing a proper set of complexity ``N``.

    A product of one equation per piece gives ``N ** N``.  ``practical``
    overrides the value; exceeding ``ceiling`` without an override raises.
    """
    N = _n(N)
    if practical is not None:
        if int(practical) < 1:
            raise ValueError("practical degree must be at least 1")
        return DegreeBound(int(practical))
    value = N ** N
    if value > ceiling:
        raise BudgetError(
            f"degree bound {N}^{N} = {value} exceeds the ceiling {ceiling}; "
            "pass a practical degree override"
        )
    return DegreeBound(value)
