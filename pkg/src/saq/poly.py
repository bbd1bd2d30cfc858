"""Sparse multivariate polynomials with exact rational coefficients.

Variables are positional.  Names only matter when parsing or printing, where
a list of variable names is supplied by the caller.
"""

from fractions import Fraction
from math import lcm
import numbers
import re

from .errors import DimensionError, ParseError

__all__ = [
    "Polynomial",
    "parse_poly",
    "serialize_poly",
    "default_var_names",
]


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, numbers.Integral):
        return Fraction(int(c))
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, numbers.Rational):
        return Fraction(c.numerator, c.denominator)
    raise TypeError(f"polynomial coefficients must be rational, got {c!r}")


class Polynomial:
    """A polynomial in ``nvars`` variables stored as ``{exponents: coeff}``.

    Instances are treated as immutable.  Zero coefficients are never stored,
    so the zero polynomial has an empty term map.
    """

    __slots__ = ("nvars", "_terms", "_hash", "_degree", "_int_form")

    def __init__(self, nvars, terms=None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = int(nvars)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise DimensionError(
                    f"exponent tuple {exps} has length {len(exps)}, expected {self.nvars}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _as_fraction(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self._hash = None
        self._degree = None
        self._int_form = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, index):
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1})

    # -- basic queries ------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return all(not any(e) for e in self._terms)

    def constant_value(self):
        return self._terms.get((0,) * self.nvars, Fraction(0))

    @property
    def degree(self):
        """Total degree; the zero polynomial has degree 0 here."""
        if self._degree is None:
            self._degree = max((sum(e) for e in self._terms), default=0)
        return self._degree

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, numbers.Rational):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self.nvars}, {serialize_poly(self)!r})"

    def sort_key(self):
        return tuple(sorted(self._terms.items(), key=lambda t: _grlex_key(t[0])))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError(
                    f"cannot combine polynomials in {self.nvars} and {other.nvars} variables"
                )
            return other
        if isinstance(other, numbers.Rational):
            return Polynomial.constant(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, numbers.Integral) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c):
        c = _as_fraction(c)
        return Polynomial(self.nvars, {e: c * v for e, v in self._terms.items()})

    # -- calculus and substitution -----------------------------------------

    def differentiate(self, var_index):
        if not 0 <= var_index < self.nvars:
            raise IndexError(f"variable index {var_index} out of range for {self.nvars} variables")
        out = {}
        for e, c in self._terms.items():
            k = e[var_index]
            if k:
                d = list(e)
                d[var_index] = k - 1
                out[tuple(d)] = c * k
        return Polynomial(self.nvars, out)

    def substitute_affine(self, A, b):
        """Return ``p(A y + b)`` as a polynomial in the columns of ``A``.

        ``A`` has one row per variable of ``self``; its column count is the
        number of variables of the result.
        """
        A = [[_as_fraction(a) for a in row] for row in A]
        b = [_as_fraction(v) for v in b]
        if len(A) != self.nvars or len(b) != self.nvars:
            raise DimensionError(
                f"affine map must have {self.nvars} rows, got {len(A)} rows and offset of length {len(b)}"
            )
        m = len(A[0]) if A else 0
        if m < 1 or any(len(row) != m for row in A):
            raise DimensionError("affine map rows must share a positive column count")
        images = []
        for row, off in zip(A, b):
            terms = {(0,) * m: off}
            for j, a in enumerate(row):
                if a:
                    e = [0] * m
                    e[j] = 1
                    terms[tuple(e)] = a
            images.append(Polynomial(m, terms))
        powers = [dict() for _ in range(self.nvars)]

        def power(i, k):
            if k not in powers[i]:
                powers[i][k] = images[i] ** k
            return powers[i][k]

        result = Polynomial.zero(m)
        for e, c in self._terms.items():
            term = Polynomial.constant(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def embed(self, nvars, offset):
        """Rename variable ``i`` to ``i + offset`` in an ``nvars``-variable ring."""
        if offset < 0 or offset + self.nvars > nvars:
            raise DimensionError("embedding does not fit")
        out = {}
        for e, c in self._terms.items():
            full = [0] * nvars
            full[offset:offset + self.nvars] = e
            out[tuple(full)] = c
        return Polynomial(nvars, out)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, point):
        return self.eval(point)

    def eval(self, point):
        """Evaluate at ``point``; exact when every coordinate is rational."""
        point = list(point)
        if len(point) != self.nvars:
            raise DimensionError(f"point has length {len(point)}, expected {self.nvars}")
        if all(isinstance(v, numbers.Rational) for v in point):
            point = [_as_fraction(v) for v in point]
            total = Fraction(0)
        else:
            point = [float(v) for v in point]
            total = 0.0
        for e, c in self._terms.items():
            t = c if isinstance(total, Fraction) else float(c)
            for v, k in zip(point, e):
                if k:
                    t *= v ** k
            total += t
        return total

    def integer_form(self):
        """``(exps, coefs, degree)`` with integer coefficients, a positive
        multiple of ``self``.  Used by the exact batch evaluators."""
        if self._int_form is None:
            den = lcm(*(c.denominator for c in self._terms.values())) if self._terms else 1
            exps = tuple(self._terms)
            coefs = tuple(int(c * den) for c in self._terms.values())
            self._int_form = (exps, coefs, self.degree)
        return self._int_form


def _grlex_key(exps):
    # ascending graded order, ties broken lex-descending
    return (sum(exps), tuple(-e for e in exps))


def default_var_names(n, prefix="x"):
    return [f"{prefix}{i + 1}" for i in range(n)]


# -- text form ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _PolyParser:
    def __init__(self, text, var_names):
        self.text = text
        self.names = {name: i for i, name in enumerate(var_names)}
        self.nvars = len(var_names)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            q = self.unary()
            if tok[1] == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise self.error("division only by a nonzero constant", tok)
                p = p.scale(1 / q.constant_value())
        return p

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            p = self.unary()
            return -p if tok[1] == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("^", "**"):
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                raise self.error("negative exponents are not allowed")
            exp_tok = self.take()
            if exp_tok[0] != "num" or "." in exp_tok[1]:
                raise self.error("exponent must be a non-negative integer literal", exp_tok)
            return base ** (sign * int(exp_tok[1]))
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return Polynomial.constant(self.nvars, Fraction(val))
        if kind == "name":
            if val not in self.names:
                raise self.error(f"unknown variable {val!r}", tok)
            return Polynomial.variable(self.nvars, self.names[val])
        if kind == "op" and val == "(":
            p = self.expr()
            close = self.take()
            if close[1] != ")":
                raise self.error("expected ')'", close)
            return p
        raise self.error(f"unexpected token {val!r}" if val else "unexpected end of input", tok)


def parse_poly(text, var_names):
    """Parse an arithmetic expression into a :class:`Polynomial`.

    >>> parse_poly("(x1 - x2)*(x1 + x2)", ["x1", "x2"]).terms == {(2, 0): 1, (0, 2): -1}
    True
    """
    if not var_names:
        raise ValueError("at least one variable name is required")
    return _PolyParser(text, list(var_names)).parse()


def _format_coeff(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def serialize_poly(poly, var_names=None):
    """Canonical text: graded-lex descending terms, ``*`` and ``^`` explicit."""
    names = var_names or default_var_names(poly.nvars)
    if len(names) != poly.nvars:
        raise DimensionError(f"{len(names)} names for {poly.nvars} variables")
    if poly.is_zero():
        return "0"
    parts = []
    for exps in sorted(poly._terms, key=lambda e: (sum(e), e), reverse=True):
        c = poly._terms[exps]
        mono = "*".join(
            names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(exps) if k
        )
        mag = abs(c)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if not parts:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(parts)
