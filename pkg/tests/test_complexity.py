import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from saq.complexity import (
    ComplexityBound,
    DegreeBound,
    affine_preimage,
    bound_affine_preimage,
    bound_complement,
    bound_exists,
    bound_forall,
    bound_intersection,
    bound_projection,
    bound_union,
    complement,
    cpl,
    cpl_report,
    degree_bound,
    exists_semi_oracle,
    intersection,
    union,
)
from saq.errors import BudgetError, DimensionError
from saq.sets import empty_set, full_space, parse_set, serialize_set

GOLDEN = Path(__file__).parent / "golden"


def test_cpl_examples():
    assert cpl(parse_set("{x1 > 0}")).value == 1
    assert cpl(parse_set("{x1^2 + x2^2 - 25 = 0}")).value == 2
    five = " | ".join(["{x1^3 - x2 > 0, x1 = 0, x2^2 > 0}"] * 5)
    S = parse_set(five, nvars=2)
    # identical pieces are kept: DNF is not simplified
    assert len(S.pieces) == 5
    assert cpl(S).value == 5


def test_cpl_report_fields():
    r = cpl_report(parse_set("{x1^3 > 0, x2 = 0} | {x1 > 0}", nvars=2))
    assert r.as_dict() == {"complexity": 3, "pieces": 2, "conditions": 2, "vars": 2, "degree": 3}
    assert cpl(empty_set(1)).value == 1


def test_bound_constants():
    assert [bound_union(n, n).value for n in (1, 2, 3)] == [2, 4, 6]
    assert bound_union(3, 3).value == 6
    assert [bound_intersection(n, n).value for n in (1, 2, 3)] == [2, 4, 9]
    assert [degree_bound(n).value for n in (1, 2, 3)] == [1, 4, 27]


def test_bound_complement_chain():
    # 2N per negated condition, N of them per piece, N pieces intersected
    assert [bound_complement(n).value for n in (1, 2, 3)] == [2, 64, 5832]


def test_union_intersection_identities():
    X = parse_set("{x1 > 0, x2^2 - x1 = 0} | {x2 < 1}")
    assert union(X, empty_set(2)) == X
    assert intersection(X, full_space(2)) == X
    with pytest.raises(DimensionError):
        union(X, parse_set("{x1 > 0}"))


def test_complement_examples():
    C = complement(parse_set("{x1 > 0}"))
    assert serialize_set(C) == "{x1 = 0} | {-x1 > 0}"
    assert cpl(C).value <= 2
    assert complement(full_space(2)).pieces == ()
    assert complement(empty_set(2)) == full_space(2)


def test_double_complement_membership(rng):
    from fractions import Fraction

    # complements grow like (2N)^N pieces per application, so keep X small
    X = parse_set("{x1^2 + x2^2 - 4 < 0} | {x1*x2 = 1}")
    CC = complement(complement(X))
    for _ in range(1000):
        p = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-8, 9, 2), rng.integers(1, 4, 2))]
        assert CC.contains(p) == X.contains(p)


def test_affine_preimage_bound_counts_source_variables():
    X = parse_set("{x1 - 2 > 0}")
    P = affine_preimage(X, [[1, 2, 3]], [1])
    assert P.nvars == 3
    assert cpl(P).value == 3
    assert bound_affine_preimage(cpl(X)).value == 2
    assert bound_affine_preimage(cpl(X), source_dim=3).value == 3


def test_projection_golden():
    golden = json.loads((GOLDEN / "bound_projection.json").read_text())
    for n, v in golden["values"].items():
        assert bound_projection(int(n), golden["profile"]).value == v
    assert bound_projection(2).value == golden["values"]["2"]
    assert bound_projection(1).value >= 1


def test_projection_profiles():
    assert bound_projection(3, "single_exponential").value == 216
    assert bound_projection(2, (3, 2)).value == 6 ** 4
    assert bound_projection(2, {"c1": 1}).value == 16
    assert bound_exists(2) == bound_projection(2)
    assert bound_forall(1).value >= bound_complement(1).value


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))
def test_bounds_monotone(a, b, c):
    lo, hi = min(a, b), max(a, b)
    assert bound_union(lo, c) <= bound_union(hi, c)
    assert bound_intersection(lo, c) <= bound_intersection(hi, c)
    assert bound_complement(lo) <= bound_complement(hi)
    assert bound_affine_preimage(lo) <= bound_affine_preimage(hi)
    assert bound_projection(min(lo, 4)) <= bound_projection(min(hi, 4))


def test_degree_bound_override_and_ceiling():
    assert degree_bound(7, practical=6).value == 6
    with pytest.raises(BudgetError):
        degree_bound(9)
    with pytest.raises(ValueError):
        degree_bound(2, practical=0)
    with pytest.raises(ValueError):
        ComplexityBound(0)
    with pytest.raises(ValueError):
        DegreeBound(0)


def test_exists_semi_oracle():
    T = parse_set("{x2^2 - x1 = 0}", nvars=2)
    assert exists_semi_oracle(T, [4], [[1], [2], [3]]) is True
    assert exists_semi_oracle(T, [-1], [[1], [2]]) is None
