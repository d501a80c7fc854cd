from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import assume, given, settings, strategies as st

from apollokit.arith import (clear_to_integer, descartes_lorentz_necessary, equivalence_details,
                             factorize, find_rational_intertwiner, form_padic_invariant,
                             is_prime, is_rational_square, jacobi, legendre,
                             padic_invariant_scalar, prime_factors, rationally_equivalent,
                             signature_of, square_class_equal, super_rational_dimension,
                             wilker_lorentz_necessary)
from apollokit.errors import DimensionError, Exhausted, NotEquivalent
from apollokit.exactq import RationalMatrix, congruence
from apollokit.forms import QuadraticForm, descartes_form, lorentz_form, wilker_form

primes = st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23])
nonzero = st.integers(-10_000, 10_000).filter(lambda x: x != 0)


def diag_form(*d):
    return QuadraticForm.from_matrix(RationalMatrix.diagonal([Fraction(x) for x in d]))


def test_scalar_symbol_examples():
    assert padic_invariant_scalar(3, 3).value == 3
    assert padic_invariant_scalar(2, 2).value == 1
    assert padic_invariant_scalar(9, 5).value == 1
    assert padic_invariant_scalar(1, 7).value == 1
    # 2 is not a square mod 3, so sigma_3(6) picks up the extra 4
    assert padic_invariant_scalar(6, 3).value == 7


def test_scalar_symbol_rejects_bad_input():
    with pytest.raises(ValueError):
        padic_invariant_scalar(0, 3)
    with pytest.raises(ValueError):
        padic_invariant_scalar(5, 4)


def test_form_symbol_is_sum():
    d = [2, 2, 2, -2]
    total = sum(padic_invariant_scalar(x, 2).value for x in d) % 8
    assert form_padic_invariant(d, 2).value == total


def test_clear_to_integer():
    assert clear_to_integer(Fraction(3, 4)) == 12
    assert clear_to_integer(-5) == -5


@settings(max_examples=200, deadline=None)
@given(nonzero, st.integers(1, 200), primes)
def test_symbol_invariant_under_squares(d, r, p):
    assert padic_invariant_scalar(d * r * r, p) == padic_invariant_scalar(d, p)


@settings(max_examples=100, deadline=None)
@given(st.lists(nonzero, min_size=1, max_size=5), st.randoms(use_true_random=False), primes)
def test_form_symbol_order_independent(d, rnd, p):
    e = list(d)
    rnd.shuffle(e)
    assert form_padic_invariant(d, p) == form_padic_invariant(e, p)


@settings(max_examples=200, deadline=None)
@given(st.integers(-500, 500), st.sampled_from([3, 5, 7, 11, 13, 101]))
def test_legendre_matches_jacobi_and_brute_force(a, p):
    squares = {x * x % p for x in range(1, p)}
    expect = 0 if a % p == 0 else (1 if a % p in squares else -1)
    assert legendre(a, p) == expect == jacobi(a, p)


def test_factorize_and_primes():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert prime_factors(-45) == {3, 5}
    assert prime_factors(1) == set()
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_square_classes():
    assert square_class_equal(2, 8)
    assert square_class_equal(Fraction(3, 4), 3)
    assert not square_class_equal(2, 3)
    assert not square_class_equal(-1, 1)
    assert is_rational_square(Fraction(9, 49))
    assert not is_rational_square(-4)
    with pytest.raises(ValueError):
        square_class_equal(0, 1)


def test_signature_of():
    assert signature_of([1, -2, 3]) == (2, 1)


@pytest.mark.parametrize("n,expected", [(2, True), (3, False), (8, True), (9, True), (4, False),
                                        (18, True), (25, True), (5, False)])
def test_descartes_vs_wilker(n, expected):
    assert rationally_equivalent(descartes_form(n), wilker_form(n)) is expected
    assert super_rational_dimension(n) is expected


def test_super_rational_dimension_list():
    got = [n for n in range(2, 60) if super_rational_dimension(n)]
    assert got == [2, 8, 9, 18, 25, 32, 49, 50]
    with pytest.raises(ValueError):
        super_rational_dimension(1)


def test_details_structure():
    info = equivalence_details(descartes_form(3), wilker_form(3))
    assert 2 in info["primes"]
    assert set(info["symbols"]) == set(info["primes"])
    assert info["signatures"][0] == info["signatures"][1]


def test_details_dimension_mismatch():
    with pytest.raises(DimensionError):
        equivalence_details(descartes_form(3), wilker_form(4))


def test_classical_small_forms():
    # x^2 + y^2 and 2x^2 + 2y^2 are equivalent; x^2 + y^2 and 3x^2 + 3y^2 are not
    assert rationally_equivalent(diag_form(1, 1), diag_form(2, 2))
    assert not rationally_equivalent(diag_form(1, 1), diag_form(3, 3))
    assert not rationally_equivalent(diag_form(1, 1), diag_form(1, -1))


def test_lorentz_necessary_predicates():
    assert [n for n in range(2, 40) if descartes_lorentz_necessary(n)] == [2, 8, 18, 32]
    assert wilker_lorentz_necessary(4) and not wilker_lorentz_necessary(5)


@pytest.mark.parametrize("n", [2, 8, 9])
def test_intertwiner_descartes_to_wilker(n):
    q1, q2 = descartes_form(n), wilker_form(n)
    W = find_rational_intertwiner(q1, q2)
    assert congruence(W, q1.matrix) == q2.matrix


def test_intertwiner_lorentz_n2_fast_path():
    W = find_rational_intertwiner(descartes_form(2), lorentz_form(2))
    assert congruence(W, descartes_form(2).matrix) == lorentz_form(2).matrix


def test_intertwiner_small_diagonal_search():
    q1, q2 = diag_form(1, 1), diag_form(2, 2)
    W = find_rational_intertwiner(q1, q2, strategy="search")
    assert congruence(W, q1.matrix) == q2.matrix


def test_intertwiner_not_equivalent():
    with pytest.raises(NotEquivalent):
        find_rational_intertwiner(descartes_form(3), wilker_form(3))


def test_intertwiner_exhausted():
    q1, q2 = diag_form(1, 1, 1), diag_form(13, 13, 1)
    assert rationally_equivalent(q1, q2)
    with pytest.raises(Exhausted):
        find_rational_intertwiner(q1, q2, height_bound=1, strategy="search", max_candidates=5)


def test_intertwiner_bad_strategy():
    with pytest.raises(ValueError):
        find_rational_intertwiner(diag_form(1, 1), diag_form(2, 2), strategy="magic")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=9, max_size=9), st.lists(nonzero, min_size=3, max_size=3))
def test_equivalence_detects_random_congruences(entries, d):
    # q2 = A^T q1 A for a random invertible integer A must be equivalent to q1
    A = RationalMatrix.from_rows([entries[0:3], entries[3:6], entries[6:9]])
    from apollokit.exactq import determinant
    assume(determinant(A) != 0)
    q1 = diag_form(*d)
    q2 = QuadraticForm.from_matrix(congruence(A, q1.matrix))
    assert rationally_equivalent(q1, q2)
