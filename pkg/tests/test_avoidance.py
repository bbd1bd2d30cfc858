from fractions import Fraction
from math import comb

import pytest
import sympy

from saq.avoidance import (
    avoidance_set,
    bareiss_rank,
    certify_general_position,
    evaluation_matrix,
    monomial_basis,
    moment_curve_set,
)


def test_monomial_basis_examples():
    assert monomial_basis(1, 2) == [(0,), (1,), (2,)]
    assert monomial_basis(2, 1) == [(0, 0), (1, 0), (0, 1)]
    assert len(monomial_basis(2, 2)) == 6
    for n in (1, 2, 3):
        for d in range(5):
            assert len(monomial_basis(n, d)) == comb(n + d, d)


def test_certify_examples():
    assert certify_general_position([[0], [1], [2]], 2)[0]
    ok, report = certify_general_position([[0], [0], [1]], 2)
    assert not ok and report.rank == 2
    assert certify_general_position([[Fraction(7, 3), -1]], 0)[0]


@pytest.mark.parametrize("seed", range(4))
def test_bareiss_rank_matches_sympy(seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    rows = rng.integers(-3, 4, size=(6, 5)).tolist()
    rows[4] = [a + b for a, b in zip(rows[0], rows[1])]
    assert bareiss_rank(rows) == sympy.Matrix(rows).rank()


def test_evaluation_matrix_rows_are_scaled_monomials():
    pts = [[Fraction(1, 2), Fraction(-2, 3)]]
    row = evaluation_matrix(pts, 2)[0]
    exact = [Fraction(1, 2) ** a * Fraction(-2, 3) ** b for a, b in monomial_basis(2, 2)]
    ratio = Fraction(row[0]) / exact[0]
    assert ratio > 0
    assert [Fraction(v) for v in row] == [ratio * e for e in exact]


def test_avoidance_examples():
    s = avoidance_set(1, 2, seed=5)
    assert len(s.points) == 3 and len(set(s.points)) == 3
    assert s.certificate.full_column_rank
    assert len(avoidance_set(2, 0, seed=11).points) == 1


def test_deterministic_per_seed():
    assert avoidance_set(3, 3, seed=9).points == avoidance_set(3, 3, seed=9).points
    assert avoidance_set(3, 3, seed=9).points != avoidance_set(3, 3, seed=10).points


def test_prefix_degrees_stay_certified():
    s = avoidance_set(2, 4, seed=1)
    for d in range(5):
        assert certify_general_position(s.points, d)[0]


def test_scaling_preserves_certificate():
    s = avoidance_set(2, 3, seed=2)
    scaled = s.scaled((-10, 1), (10, 3), 16)
    assert all(-10 <= p[0] <= 10 and 1 <= p[1] <= 3 for p in scaled)
    assert certify_general_position(scaled, 3)[0]


def test_moment_curve():
    s = moment_curve_set(4)
    assert [p[0] for p in s.points] == [0, 1, 2, 3, 4]
