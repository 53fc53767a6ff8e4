"""Exact Gaussian-rational arithmetic and linear algebra."""

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from strategies import antisymmetric3, gauss, matrices, nonzero_gauss

from superint.exact import (I, ONE, ZERO, ExactMatrix, ExactPoly, GaussC, cayley_orthogonal,
                            charpoly, distinct_root_count, exact_rank, format_gauss, parse_gauss)
from superint.orbits import QuadS2, phi_matrix


def test_exact_rank_identity_and_zero():
    assert exact_rank(ExactMatrix.identity(3)) == 3
    assert exact_rank(ExactMatrix.zeros(3, 3)) == 0


def test_phi_of_j3_squared_has_rank_two():
    m = phi_matrix(QuadS2.from_entries([0, 0, 1, 0, 0, 0]))
    assert (m.rows, m.cols) == (6, 3)
    assert exact_rank(m) == 2


@pytest.mark.parametrize(("coeffs", "expected"), [
    ([0, -1, 0, 1], 3),          # l^3 - l
    ([0, 0, 1], 1),              # l^2
    ([0, 1, -2, 1], 2),          # l (l - 1)^2, char poly of diag(1, 1, 0)
])
def test_distinct_root_count(coeffs, expected):
    assert distinct_root_count(ExactPoly([GaussC(c) for c in coeffs])) == expected


def test_charpoly_of_diag_110():
    m = ExactMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert distinct_root_count(charpoly(m)) == 2


def test_distinct_root_count_rejects_zero():
    with pytest.raises(ValueError):
        distinct_root_count(ExactPoly([ZERO]))


def test_cayley_of_zero_is_identity():
    assert cayley_orthogonal(ExactMatrix.zeros(3, 3)) == ExactMatrix.identity(3)


def test_cayley_single_entry_pattern():
    a = ExactMatrix.from_rows([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    q = cayley_orthogonal(a)
    assert q == ExactMatrix.from_rows([[0, 1, 0], [-1, 0, 0], [0, 0, 1]])


def test_cayley_singular_raises():
    # I - a is singular when a has eigenvalue 1: a12 = i gives eigenvalues 0, +-1
    a = ExactMatrix.from_rows([[0, I, 0], [-I, 0, 0], [0, 0, 0]])
    with pytest.raises(ZeroDivisionError):
        cayley_orthogonal(a)


def test_division_by_zero_is_an_error():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_parse_and_format_round_trip():
    for text in ["0", "1", "-i", "1/2+3i", "-2/3-1/5i", "7i"]:
        z = parse_gauss(text)
        assert parse_gauss(format_gauss(z)) == z
    assert parse_gauss("1/2+3i") == GaussC(Fraction(1, 2), 3)


@given(nonzero_gauss)
def test_inverse_round_trip(x):
    assert x * x.inverse() == ONE


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a - a).is_zero()


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_of_transpose(m):
    assert exact_rank(m) == exact_rank(m.transpose())


@given(st.lists(gauss, min_size=2, max_size=5), nonzero_gauss)
def test_distinct_roots_scale_invariant(coeffs, s):
    p = ExactPoly(coeffs)
    assume(p.degree >= 1)
    assert distinct_root_count(p) == distinct_root_count(p.scale(s))


@settings(max_examples=60, deadline=None)
@given(antisymmetric3())
def test_cayley_is_orthogonal(a):
    try:
        q = cayley_orthogonal(a)
    except ZeroDivisionError:
        return
    assert q.transpose() @ q == ExactMatrix.identity(3)
