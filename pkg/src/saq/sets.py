"""Semi-algebraic sets in disjunctive normal form.

A :class:`SemialgSet` is a union of :class:`BasicSet` pieces, each a
conjunction of conditions ``g = 0`` or ``g > 0``.  Other relations are
accepted in text input and rewritten into these two kinds when parsed.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
import re

import numpy as np

from . import kernels
from .errors import DimensionError, ParseError
from .poly import Polynomial, default_var_names, parse_poly, serialize_poly

__all__ = [
    "Rel",
    "SignCondition",
    "BasicSet",
    "SemialgSet",
    "parse_set",
    "serialize_set",
    "full_space",
    "empty_set",
    "member_mask",
    "rational_batch",
]


class Rel(Enum):
    EQ0 = "="
    GT0 = ">"


@dataclass(frozen=True)
class SignCondition:
    poly: Polynomial
    rel: Rel

    def holds(self, point, tol=0.0):
        v = self.poly.eval(point)
        if self.rel is Rel.EQ0:
            return v == 0 if isinstance(v, Fraction) else abs(v) <= tol
        return v > 0

    def negated_pieces(self):
        """Conditions whose union is the complement of this one."""
        g = self.poly
        if self.rel is Rel.EQ0:
            return [SignCondition(g, Rel.GT0), SignCondition(-g, Rel.GT0)]
        return [SignCondition(g, Rel.EQ0), SignCondition(-g, Rel.GT0)]

    def __str__(self):
        return f"{serialize_poly(self.poly)} {self.rel.value} 0"


class BasicSet:
    """Conjunction of sign conditions; repeated conditions are dropped."""

    __slots__ = ("nvars", "conditions")

    def __init__(self, nvars, conditions=()):
        self.nvars = int(nvars)
        seen = set()
        kept = []
        for c in conditions:
            if c.poly.nvars != self.nvars:
                raise DimensionError(
                    f"mixed ambient dimensions: condition in {c.poly.nvars} variables "
                    f"inside a set in {self.nvars}"
                )
            if c not in seen:
                seen.add(c)
                kept.append(c)
        self.conditions = tuple(kept)

    def __eq__(self, other):
        return isinstance(other, BasicSet) and (self.nvars, self.conditions) == (other.nvars, other.conditions)

    def __hash__(self):
        return hash((self.nvars, self.conditions))

    def __repr__(self):
        return f"BasicSet({self.nvars}, {[str(c) for c in self.conditions]})"

    @property
    def degree(self):
        return max((c.poly.degree for c in self.conditions), default=0)

    def contains(self, point, tol=0.0):
        return all(c.holds(point, tol) for c in self.conditions)


class SemialgSet:
    __slots__ = ("nvars", "pieces")

    def __init__(self, nvars, pieces=()):
        self.nvars = int(nvars)
        pieces = tuple(pieces)
        for piece in pieces:
            if piece.nvars != self.nvars:
                raise DimensionError(
                    f"mixed ambient dimensions: piece in {piece.nvars} variables "
                    f"inside a set in {self.nvars}"
                )
        self.pieces = pieces

    def __eq__(self, other):
        return isinstance(other, SemialgSet) and (self.nvars, self.pieces) == (other.nvars, other.pieces)

    def __hash__(self):
        return hash((self.nvars, self.pieces))

    def __repr__(self):
        return f"SemialgSet({self.nvars}, {serialize_set(self)!r})"

    def is_empty_union(self):
        return not self.pieces

    def contains(self, point, tol=0.0):
        if len(point) != self.nvars:
            raise DimensionError(f"point has length {len(point)}, expected {self.nvars}")
        return any(piece.contains(point, tol) for piece in self.pieces)

    def polynomials(self):
        out = []
        for piece in self.pieces:
            out.extend(c.poly for c in piece.conditions)
        return out


def full_space(nvars):
    return SemialgSet(nvars, [BasicSet(nvars)])


def empty_set(nvars):
    return SemialgSet(nvars)


# -- text form ---------------------------------------------------------------

_REL_RE = re.compile(r"(>=|<=|!=|==|=|>|<)")
_VAR_RE = re.compile(r"\bx(\d+)\b")

_DESUGAR = {
    "=": lambda g: [[SignCondition(g, Rel.EQ0)]],
    "==": lambda g: [[SignCondition(g, Rel.EQ0)]],
    ">": lambda g: [[SignCondition(g, Rel.GT0)]],
    "<": lambda g: [[SignCondition(-g, Rel.GT0)]],
    ">=": lambda g: [[SignCondition(g, Rel.EQ0)], [SignCondition(g, Rel.GT0)]],
    "<=": lambda g: [[SignCondition(g, Rel.EQ0)], [SignCondition(-g, Rel.GT0)]],
    "!=": lambda g: [[SignCondition(g, Rel.GT0)], [SignCondition(-g, Rel.GT0)]],
}


def _split_top(text, sep, start):
    """Split on ``sep`` outside parentheses and braces; yields (chunk, offset)."""
    depth = 0
    begin = 0
    for i, ch in enumerate(text):
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        elif ch == sep and depth == 0:
            yield text[begin:i], start + begin
            begin = i + 1
    yield text[begin:], start + begin


def _parse_condition(chunk, offset, names, full_text):
    m = next(
        (m for m in _REL_RE.finditer(chunk)
         if chunk.count("(", 0, m.start()) == chunk.count(")", 0, m.start())),
        None,
    )
    if m is None:
        raise ParseError("expected a relation (=, >, >=, <, <=, !=)", full_text, offset)
    lhs, rhs = chunk[:m.start()], chunk[m.end():]
    try:
        g = parse_poly(lhs, names)
        h = parse_poly(rhs, names)
    except ParseError as exc:
        pos = offset + (exc.position or 0)
        if exc.text == rhs:
            pos += m.end()
        raise ParseError(exc.message, full_text, pos) from None
    return _DESUGAR[m.group(1)](g - h)


def parse_set(text, nvars=None, var_names=None):
    """Parse ``{cond, ...} | {...}`` into a desugared :class:`SemialgSet`.

    ``var_names`` fixes the variables; otherwise they are ``x1..x{nvars}``
    with ``nvars`` inferred from the largest index present when omitted.
    The literal ``empty`` denotes the empty union.
    """
    if var_names is None:
        if nvars is None:
            nvars = max((int(i) for i in _VAR_RE.findall(text)), default=1)
        var_names = default_var_names(nvars)
    names = list(var_names)
    n = len(names)
    stripped = text.strip()
    if stripped in ("empty", "∅"):
        return empty_set(n)
    pieces = []
    for chunk, offset in _split_top(text, "|", 0):
        body = chunk.strip()
        lead = offset + (len(chunk) - len(chunk.lstrip()))
        if not (body.startswith("{") and body.endswith("}")):
            raise ParseError("each piece must be enclosed in braces", text, lead)
        inner = body[1:-1]
        alternatives = []
        if inner.strip():
            for cond, coff in _split_top(inner, ",", lead + 1):
                if not cond.strip():
                    raise ParseError("empty condition", text, coff)
                alternatives.append(_parse_condition(cond, coff, names, text))
        for combo in product(*alternatives):
            conds = [c for part in combo for c in part]
            pieces.append(BasicSet(n, conds))
    return SemialgSet(n, pieces)


def serialize_set(S, var_names=None):
    names = var_names or default_var_names(S.nvars)
    if not S.pieces:
        return "empty"
    out = []
    for piece in S.pieces:
        conds = ", ".join(
            f"{serialize_poly(c.poly, names)} {c.rel.value} 0" for c in piece.conditions
        )
        out.append("{" + conds + "}")
    return " | ".join(out)


# -- exact batch membership ----------------------------------------------------

def rational_batch(points):
    """``(nums, dens)`` integer arrays for a list of rational vectors."""
    points = [[Fraction(v) for v in pt] for pt in points]
    nums, dens = [], []
    for pt in points:
        den = 1
        for v in pt:
            den = den * v.denominator // np.gcd(den, v.denominator)
        dens.append(den)
        nums.append([int(v * den) for v in pt])
    n = len(points[0]) if points else 0
    return np.array(nums, dtype=object).reshape(-1, n), np.array(dens, dtype=object)


def member_mask(S, nums, dens, cache=None):
    """Exact membership of the rational points ``nums / dens`` in ``S``.

    ``cache`` maps polynomials to sign arrays and may be shared between sets
    evaluated on the same batch.
    """
    if cache is None:
        cache = {}
    M = len(dens)
    out = np.zeros(M, dtype=bool)

    def signs(poly):
        s = cache.get(poly)
        if s is None:
            s = kernels.rational_signs(poly, nums, dens)
            cache[poly] = s
        return s

    for piece in S.pieces:
        mask = np.ones(M, dtype=bool)
        for c in piece.conditions:
            s = signs(c.poly)
            mask &= (s == 0) if c.rel is Rel.EQ0 else (s > 0)
        out |= mask
    return out
