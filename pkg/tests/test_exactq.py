from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apollokit.errors import DimensionError, SingularMatrixError
from apollokit.exactq import (RationalMatrix, congruence, determinant, inverse, mat_mul, nullspace,
                              rational_from_str, rational_to_str)
from apollokit.forms import descartes_form, wilker_form
from apollokit.groups import apollonian_generator

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def square(k):
    return st.lists(st.lists(small, min_size=k, max_size=k), min_size=k, max_size=k).map(
        RationalMatrix.from_rows)


def test_identity_product():
    I = RationalMatrix.identity(4)
    assert mat_mul(I, I) == I


def test_generator_squares_to_identity():
    S = apollonian_generator(3, 1)
    assert mat_mul(S, S) == RationalMatrix.identity(5)


def test_scalar_scaling():
    q = descartes_form(2).matrix
    assert mat_mul(q, RationalMatrix.identity(4).scale(2)) == q.scale(2)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        mat_mul(RationalMatrix.identity(2), RationalMatrix.identity(3))
    with pytest.raises(DimensionError):
        congruence(RationalMatrix.identity(3), RationalMatrix.identity(4))


def test_congruence_examples():
    qd3 = descartes_form(3).matrix
    assert congruence(RationalMatrix.identity(5), qd3) == qd3
    assert congruence(apollonian_generator(3, 1), qd3) == qd3
    W = RationalMatrix.from_rows([[2, 0, 1, 0], [2, 0, -1, 0], [0, 1, 0, 1], [0, 1, 0, -1]])
    assert congruence(W, descartes_form(2).matrix) == wilker_form(2).matrix


def test_determinant_examples():
    assert determinant(descartes_form(2).matrix) == -1
    assert determinant(descartes_form(3).matrix) == Fraction(-2, 3)
    assert determinant(RationalMatrix.identity(6)) == 1
    with pytest.raises(DimensionError):
        determinant(RationalMatrix.from_rows([[1, 2, 3]]))


def test_inverse_examples():
    assert inverse(RationalMatrix.identity(4)) == RationalMatrix.identity(4)
    S = apollonian_generator(3, 1)
    assert inverse(S) == S
    d = RationalMatrix.diagonal([2, 2, 2, -2])
    assert inverse(d) == RationalMatrix.diagonal([Fraction(1, 2)] * 3 + [Fraction(-1, 2)])
    with pytest.raises(SingularMatrixError):
        inverse(RationalMatrix.from_rows([[1, 2], [2, 4]]))


def test_entries_are_normalized_fractions():
    m = RationalMatrix.from_rows([[Fraction(2, 4), 3]])
    assert m[0, 0] == Fraction(1, 2)
    assert m[0, 0].denominator == 2


def test_rational_strings():
    assert rational_to_str(Fraction(-3, 6)) == "-1/2"
    assert rational_from_str("7/21") == Fraction(1, 3)


def test_nullspace_basis():
    rows = [[1, 1, 0], [0, 1, 1]]
    basis = nullspace(rows)
    assert len(basis) == 1
    v = basis[0]
    assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 7).flatmap(lambda k: st.tuples(square(k), square(k))))
def test_det_multiplicative(pair):
    a, b = pair
    assert determinant(a @ b) == determinant(a) * determinant(b)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5).flatmap(lambda k: st.tuples(square(k), square(k), square(k))))
def test_associative(triple):
    a, b, c = triple
    assert (a @ b) @ c == a @ (b @ c)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6).flatmap(square))
def test_inverse_property(a):
    if determinant(a) == 0:
        with pytest.raises(SingularMatrixError):
            inverse(a)
    else:
        assert a @ inverse(a) == RationalMatrix.identity(a.rows)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_json_round_trip(a):
    assert RationalMatrix.from_json(a.to_json()) == a
