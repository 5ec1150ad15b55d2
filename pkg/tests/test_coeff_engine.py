import numpy as np
import pytest
import sympy

import coeff_engine
from coeff_engine import (
    CoeffVec,
    coefficient_value_set,
    inflate_exponents,
    phi_poly,
    phi_poly_division,
    phi_poly_negate_odd,
    phi_poly_series,
)
from errors import CoefficientOverflowError, EngineConsistencyError
from numthy import divisors, radical, totient

X = sympy.Symbol("x")


def sympy_coeffs(n):
    """Ascending coefficients of Φ_n from sympy."""
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(n, X), X).all_coeffs()))


def test_small_polynomials():
    assert phi_poly_series(1).coeffs == (-1, 1)
    assert phi_poly_series(2).coeffs == (1, 1)
    assert phi_poly_series(9).coeffs == (1, 0, 0, 1, 0, 0, 1)
    assert phi_poly_series(15).coeffs == (1, -1, 0, 1, -1, 1, 0, -1, 1)


def test_phi_105_has_minus_two_in_both_halves():
    v = phi_poly_series(105)
    assert v.degree == 48
    assert v.coeffs[7] == -2
    assert v.coeffs[41] == -2
    assert coefficient_value_set(v) == [-2, -1, 0, 1]
    assert v.height == 2
    assert v.nontrivial_values() == [-2]


@pytest.mark.parametrize("n", list(range(1, 121)) + [385, 1155, 3315])
def test_series_matches_sympy(n):
    assert phi_poly_series(n).coeffs == sympy_coeffs(n)


@pytest.mark.parametrize("n", list(range(1, 301)))
def test_engines_agree(n):
    assert phi_poly_series(n) == phi_poly_division(n)


@pytest.mark.slow
def test_engines_agree_exhaustively():
    for n in range(1, 3001):
        assert phi_poly_series(n) == phi_poly_division(n), n


def test_product_over_divisors_is_x_n_minus_one():
    for n in range(1, 201):
        product = np.ones(1, dtype=np.int64)
        for d in divisors(n):
            product = np.convolve(product, np.array(phi_poly_series(d).coeffs, dtype=np.int64))
        expected = np.zeros(n + 1, dtype=np.int64)
        expected[0], expected[n] = -1, 1
        assert product.tolist() == expected.tolist(), n


def test_palindromic_and_monic_beyond_one():
    for n in range(2, 400):
        v = phi_poly_series(n)
        assert v.is_palindromic(), n
        assert v.coeffs[-1] == 1
        assert len(v.coeffs) == totient(n) + 1


def test_radical_reduction_is_exponent_inflation():
    for n in (12, 18, 50, 75, 225, 441, 1050):
        base = phi_poly_series(radical(n))
        assert phi_poly_series(n) == inflate_exponents(base, n // radical(n))


@pytest.mark.slow
def test_radical_reduction_against_division_engine():
    for n in range(1, 2001):
        rad = radical(n)
        assert phi_poly_division(n) == inflate_exponents(phi_poly_division(rad), n // rad), n


@pytest.mark.slow
def test_palindromic_up_to_ten_thousand():
    for n in range(2, 10001):
        v = phi_poly_series(n)
        assert v.is_palindromic(), n
        assert v.coeffs[0] == v.coeffs[-1] == 1
        assert v.degree == totient(n)


def test_negate_odd_gives_phi_2n():
    for n in (3, 15, 105, 231):
        assert phi_poly_negate_odd(phi_poly_series(n)) == phi_poly_series(2 * n)


@pytest.mark.parametrize("n", [1, 10])
def test_negate_odd_rejects_even_or_one(n):
    with pytest.raises(ValueError):
        phi_poly_negate_odd(phi_poly_series(n))


def test_evaluate_at_one():
    assert phi_poly_series(1).evaluate(1) == 0
    assert phi_poly_series(7).evaluate(1) == 7
    assert phi_poly_series(27).evaluate(1) == 3
    assert phi_poly_series(15).evaluate(1) == 1
    assert phi_poly_series(15).evaluate(0) == 1
    with pytest.raises(ValueError):
        phi_poly_series(15).evaluate(2)


def test_coeffvec_validates_length_and_leading_term():
    with pytest.raises(ValueError):
        CoeffVec(3, (1, 1))
    with pytest.raises(ValueError):
        CoeffVec(3, (1, 1, 2))


@pytest.mark.parametrize("bad", [0, -3])
def test_engines_reject_nonpositive(bad):
    with pytest.raises(ValueError):
        phi_poly_series(bad)
    with pytest.raises(ValueError):
        phi_poly_division(bad)


def test_dispatcher():
    assert phi_poly(105, engine="division") == phi_poly_series(105)
    assert phi_poly(105, engine="auto") == phi_poly_series(105)
    with pytest.raises(ValueError):
        phi_poly(105, engine="guess")
    with pytest.raises(ValueError):
        phi_poly_series(105, overflow="ignore")


def test_auto_engine_reports_disagreement(monkeypatch):
    monkeypatch.setattr(coeff_engine, "phi_poly_division", lambda n: phi_poly_series(1))
    with pytest.raises(EngineConsistencyError):
        phi_poly(15, engine="auto")


def test_narrow_fast_path_raises_or_escalates(monkeypatch):
    expected = phi_poly_series(105)
    monkeypatch.setattr(coeff_engine, "_INT64_MAX", 10)
    with pytest.raises(CoefficientOverflowError) as exc_info:
        phi_poly_series(105, overflow="raise")
    assert exc_info.value.n == 105
    assert phi_poly_series(105, overflow="escalate") == expected


def test_large_coefficients_stay_exact():
    # First index whose height exceeds 2
    v = phi_poly_series(385)
    assert v.coeffs == sympy_coeffs(385)
    assert v.height == 3
