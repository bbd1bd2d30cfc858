"""Presented equivalence relations and the geometry of their classes.

A relation on ``R^n`` is presented by ``k`` polynomials ``g(x, y)`` and strict
inequalities ``h(x, y) > 0`` together with a domain set: the class of ``x``
is ``{y in domain : g(x, y) = 0, h(x, y) > 0}``, a regular level set when the
relation is submersive.  Tangent and normal spaces are kernels and row
spaces of ``dg/dy``.
"""

from dataclasses import dataclass
from functools import cached_property
import hashlib
import json
import re

import numpy as np

from . import kernels
from .complexity import affine_preimage, cpl, intersection
from .errors import (
    DimensionError,
    ParseError,
    PerpendicularityError,
    RankDeficiencyError,
    SaqError,
)
from .poly import parse_poly, serialize_poly
from .sets import BasicSet, Rel, SemialgSet, SignCondition, parse_set, serialize_set

__all__ = [
    "PresentationError",
    "RelationPresentation",
    "TangentFrame",
    "NormalFrame",
    "FocalReport",
    "load_relation",
    "load_relation_file",
    "corpus_path",
    "class_membership",
    "tangent_frame",
    "normal_frame",
    "focal_report",
    "focal_regularity",
    "nu_differential",
]

RANK_TOL = 1e-10


class PresentationError(SaqError, ValueError):
    pass


class RelationPresentation:
    """Immutable after construction; numeric caches are derived lazily."""

    def __init__(self, n, class_eqs, class_ineqs=(), domain=None, var_names=None):
        self.n = int(n)
        self.class_eqs = tuple(class_eqs)
        self.class_ineqs = tuple(class_ineqs)
        if not self.class_eqs:
            raise PresentationError("a relation needs at least one class equation")
        if len(self.class_eqs) > self.n:
            raise PresentationError(
                f"{len(self.class_eqs)} class equations exceed the ambient dimension {self.n}"
            )
        for g in self.class_eqs + self.class_ineqs:
            if g.nvars != 2 * self.n:
                raise DimensionError(f"class polynomials must be in {2 * self.n} variables")
        self.domain = domain if domain is not None else SemialgSet(self.n, [BasicSet(self.n)])
        if self.domain.nvars != self.n:
            raise DimensionError("domain must live in the x-variables")
        if var_names is None:
            var_names = [f"x{i + 1}" for i in range(self.n)] + [f"y{i + 1}" for i in range(self.n)]
        self.var_names = tuple(var_names)
        self.complexity = cpl(self.as_set())

    @property
    def k(self):
        return len(self.class_eqs)

    # -- set-level description ---------------------------------------------

    def as_set(self):
        """``R`` as a DNF set in ``R^{2n}``: equations, inequalities and the
        domain imposed on both factors."""
        n = self.n
        core = SemialgSet(2 * n, [BasicSet(
            2 * n,
            [SignCondition(g, Rel.EQ0) for g in self.class_eqs]
            + [SignCondition(h, Rel.GT0) for h in self.class_ineqs],
        )])
        eye = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        zero = [[0] * n for _ in range(n)]
        on_x = affine_preimage(self.domain, [eye[i] + zero[i] for i in range(n)], [0] * n)
        on_y = affine_preimage(self.domain, [zero[i] + eye[i] for i in range(n)], [0] * n)
        return intersection(intersection(core, on_x), on_y)

    def to_text(self):
        xs = self.var_names[:self.n]
        ys = self.var_names[self.n:]
        eqs = json.dumps([serialize_poly(g, list(self.var_names)) for g in self.class_eqs])
        ineqs = json.dumps([serialize_poly(h, list(self.var_names)) for h in self.class_ineqs])
        domain = serialize_set(self.domain, list(xs))
        if domain == "{}" or self.domain == SemialgSet(self.n, [BasicSet(self.n)]):
            domain = "{ }"
        return (
            "relation {\n"
            f"  ambient: {self.n}\n"
            f"  vars: {', '.join(xs)}, {', '.join(ys)}\n"
            f"  class_eqs: {eqs}\n"
            f"  class_ineqs: {ineqs}\n"
            f"  domain: {domain}\n"
            "}\n"
        )

    @cached_property
    def hash(self):
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def __eq__(self, other):
        return isinstance(other, RelationPresentation) and self.to_text() == other.to_text()

    def __hash__(self):
        return hash(self.to_text())

    def __repr__(self):
        return f"RelationPresentation(n={self.n}, k={self.k}, complexity={self.complexity.value})"

    # -- packed numeric systems --------------------------------------------

    @cached_property
    def system(self):
        """g, dg/dy and d2g/dy2 packed in the kernel layout."""
        n = self.n
        grads = [[g.differentiate(n + i) for i in range(n)] for g in self.class_eqs]
        polys = list(self.class_eqs)
        polys += [d for row in grads for d in row]
        polys += [d.differentiate(n + l) for row in grads for d in row for l in range(n)]
        return kernels.pack_polys(polys)

    @cached_property
    def full_jacobian_system(self):
        """g and its derivatives in all 2n variables (x block first)."""
        m = 2 * self.n
        polys = list(self.class_eqs) + [g.differentiate(i) for g in self.class_eqs for i in range(m)]
        return kernels.pack_polys(polys)

    @cached_property
    def ineq_system(self):
        return kernels.pack_polys(self.class_ineqs) if self.class_ineqs else None

    @cached_property
    def domain_system(self):
        polys = self.domain.polynomials()
        return kernels.pack_polys(polys) if polys else None

    # -- float evaluation ----------------------------------------------------

    def _z(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.shape != (self.n,) or y.shape != (self.n,):
            raise DimensionError(f"points must have length {self.n}")
        return np.concatenate([x, y])

    def g_values(self, x, y):
        return kernels.eval_polys(self.system, self._z(x, y), self.k)

    def jacobian_y(self, x, y):
        n, k = self.n, self.k
        vals = kernels.eval_polys(self.system, self._z(x, y), k + k * n)
        return vals[k:].reshape(k, n)

    def hessians_y(self, x, y):
        n, k = self.n, self.k
        vals = kernels.eval_polys(self.system, self._z(x, y))
        return vals[k + k * n:].reshape(k, n, n)

    def jacobian_full(self, x, y):
        k, m = self.k, 2 * self.n
        vals = kernels.eval_polys(self.full_jacobian_system, self._z(x, y))
        return vals[k:].reshape(k, m)

    def ineq_values(self, x, y):
        if self.ineq_system is None:
            return np.zeros(0)
        return kernels.eval_polys(self.ineq_system, self._z(x, y))

    def in_domain(self, point, tol=0.0, margin=0.0):
        """Float membership in the domain; equalities use ``tol`` and strict
        inequalities must exceed ``margin``."""
        if self.domain_system is None:
            return bool(self.domain.pieces)
        vals = kernels.eval_polys(self.domain_system, np.asarray(point, dtype=np.float64))
        pos = 0
        for piece in self.domain.pieces:
            ok = True
            for c in piece.conditions:
                v = vals[pos]
                pos += 1
                if c.rel is Rel.EQ0:
                    ok = ok and abs(v) <= tol
                else:
                    ok = ok and v > margin
            if ok:
                return True
        return False


# -- file format ---------------------------------------------------------------

_KEYS = ("ambient", "vars", "class_eqs", "class_ineqs", "domain")
_KEY_RE = re.compile(r"^[ \t]*(" + "|".join(_KEYS) + r")[ \t]*:", re.MULTILINE)
_RANGE_RE = re.compile(r"^([A-Za-z_]+)(\d+)\.\.([A-Za-z_]+)(\d+)$")


def _strip_comments(text):
    out = []
    for line in text.splitlines():
        in_str = False
        for i, ch in enumerate(line):
            if ch == '"':
                in_str = not in_str
            elif ch == "#" and not in_str:
                line = line[:i]
                break
        out.append(line)
    return "\n".join(out)


def _expand_vars(text):
    names = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        m = _RANGE_RE.match(item)
        if m:
            if m.group(1) != m.group(3):
                raise ParseError(f"range {item!r} mixes prefixes")
            lo, hi = int(m.group(2)), int(m.group(4))
            names.extend(f"{m.group(1)}{i}" for i in range(lo, hi + 1))
        else:
            names.append(item)
    return names


def load_relation(text):
    """Parse the ``relation { ... }`` text format."""
    body = _strip_comments(text).strip()
    m = re.match(r"^relation\s*\{(.*)\}\s*$", body, re.DOTALL)
    if not m:
        raise ParseError("expected 'relation { ... }'", text, 0)
    inner = m.group(1)
    matches = list(_KEY_RE.finditer(inner))
    fields = {}
    for i, km in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(inner)
        key = km.group(1)
        if key in fields:
            raise ParseError(f"duplicate key {key!r}")
        fields[key] = inner[km.end():end].strip()
    missing = [key for key in ("ambient", "class_eqs") if key not in fields]
    if missing:
        raise ParseError(f"missing keys: {', '.join(missing)}")
    try:
        n = int(fields["ambient"])
    except ValueError:
        raise ParseError(f"ambient must be an integer, got {fields['ambient']!r}") from None
    if n < 1:
        raise ParseError("ambient dimension must be positive")
    names = _expand_vars(fields["vars"]) if "vars" in fields else (
        [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    )
    if len(names) != 2 * n or len(set(names)) != 2 * n:
        raise ParseError(f"vars must list {2 * n} distinct names, got {names}")

    def poly_list(key):
        raw = fields.get(key, "[]")
        try:
            items = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{key}: {exc.msg}", raw, exc.pos) from None
        if not isinstance(items, list) or not all(isinstance(s, str) for s in items):
            raise ParseError(f"{key} must be a list of quoted expressions")
        return [parse_poly(s, names) for s in items]

    eqs = poly_list("class_eqs")
    ineqs = poly_list("class_ineqs")
    domain_text = fields.get("domain", "{ }")
    domain = parse_set(domain_text, var_names=names[:n])
    return RelationPresentation(n, eqs, ineqs, domain, names)


def load_relation_file(path):
    with open(path, encoding="utf-8") as fh:
        return load_relation(fh.read())


def corpus_path(name):
    """Path of a bundled relation file, e.g. ``corpus_path("circles")``."""
    from importlib.resources import files

    if not name.endswith(".saq"):
        name += ".saq"
    return str(files("saq") / "corpus" / name)


# -- class geometry ------------------------------------------------------------

def class_membership(rel, x, y, tol=1e-9):
    """``y`` lies in the class of ``x`` (equations to ``tol``)."""
    g = rel.g_values(x, y)
    if np.any(np.abs(g) > tol):
        return False
    if np.any(rel.ineq_values(x, y) <= 0):
        return False
    return rel.in_domain(y, tol)


def _orient(vectors):
    # sign convention: the largest-magnitude entry of each vector is positive
    out = np.array(vectors, dtype=np.float64)
    for row in out:
        a = np.abs(row)
        i = int(np.argmax(a >= a.max() - 1e-12))
        if row[i] < 0:
            row *= -1
    return out


@dataclass(frozen=True)
class TangentFrame:
    base: np.ndarray
    basis: np.ndarray  # rows are orthonormal tangent vectors


@dataclass(frozen=True)
class NormalFrame:
    base: np.ndarray
    basis: np.ndarray  # rows are orthonormal normal vectors


def _split(rel, x, y, rank_tol=RANK_TOL):
    J = rel.jacobian_y(x, y)
    _, s, vt = np.linalg.svd(J)
    rank = int(np.sum(s > rank_tol * max(s[0], 1e-300))) if s[0] > 0 else 0
    if rank < rel.k:
        raise RankDeficiencyError(
            f"dg/dy has rank {rank} < {rel.k} at y={np.asarray(y).tolist()}", rank, rel.k
        )
    return _orient(vt[:rel.k]), _orient(vt[rel.k:])


def tangent_frame(rel, x, y, rank_tol=RANK_TOL):
    _, tangent = _split(rel, x, y, rank_tol)
    return TangentFrame(np.asarray(y, dtype=np.float64), tangent)


def normal_frame(rel, x, y, rank_tol=RANK_TOL):
    normal, _ = _split(rel, x, y, rank_tol)
    return NormalFrame(np.asarray(y, dtype=np.float64), normal)


@dataclass(frozen=True)
class FocalReport:
    regular: bool
    sigma_min: float
    sigma_max: float
    lam: np.ndarray
    residual: float


def focal_report(rel, x, y, p, tol=1e-6, perp_tol=None):
    """Singular values of the normal endpoint map's differential at the
    normal vector ``p - y`` based at ``y``.

    With ``p - y = J^T lam`` the map ``(y, lam) -> y + J(y)^T lam`` restricted
    to the class has differential ``[(I + sum lam_j H_j) T, N]`` in an
    orthonormal tangent basis ``T`` and normal basis ``N``.
    """
    y = np.asarray(y, dtype=np.float64)
    v = np.asarray(p, dtype=np.float64) - y
    J = rel.jacobian_y(x, y)
    normal, tangent = _split(rel, x, y)
    lam, *_ = np.linalg.lstsq(J.T, v, rcond=None)
    residual = float(np.linalg.norm(tangent @ v)) if len(tangent) else 0.0
    if perp_tol is None:
        perp_tol = tol * max(1.0, float(np.linalg.norm(v)))
    if residual > perp_tol:
        raise PerpendicularityError(
            f"p - y has tangential component {residual:.3g} > {perp_tol:.3g}", residual
        )
    D = nu_block(rel, x, y, lam, tangent, normal)
    s = np.linalg.svd(D, compute_uv=False)
    regular = bool(s[-1] > tol * s[0])
    return FocalReport(regular, float(s[-1]), float(s[0]), lam, residual)


def nu_block(rel, x, y, lam, tangent, columns):
    n = rel.n
    H = rel.hessians_y(x, y)
    shape = np.eye(n) + np.tensordot(lam, H, axes=1)
    return np.column_stack([shape @ tangent.T, np.asarray(columns).T]) if len(tangent) else np.asarray(columns).T


def focal_regularity(rel, x, y, p, tol=1e-6, perp_tol=None):
    """True iff ``p`` is not a focal value of the class at the foot ``y``."""
    return focal_report(rel, x, y, p, tol, perp_tol).regular


def nu_differential(rel, x, y, lam):
    """Differential of ``(y, lam) -> y + J(y)^T lam`` on the class, in the
    basis (tangent frame, multiplier coordinates): ``[(I + sum lam H) T, J^T]``."""
    J = rel.jacobian_y(x, y)
    _, tangent = _split(rel, x, y)
    return nu_block(rel, x, y, np.asarray(lam, dtype=np.float64), tangent, J), tangent
