from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarsym.errors import VariableMismatchError
from polarsym.polynomials import (
    MultiPoly,
    exponents_of_degree,
    monomial,
    poly_poisson_bracket,
    products_of_degree,
)

VARS = ("x", "y")
x, y = MultiPoly.gens(VARS)

small = st.integers(min_value=-3, max_value=3)
terms = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), small, max_size=5)


def polys():
    return terms.map(lambda t: MultiPoly(VARS, t))


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys(), st.fractions(min_value=-3, max_value=3, max_denominator=5), st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_exact_evaluation_is_multiplicative(p, a, b):
    q = p * p
    assert q.eval([a, b]) == p.eval([a, b]) ** 2


def test_difference_of_squares():
    assert (x + y) * (x - y) == x**2 - y**2


def test_zero_coefficients_are_dropped():
    p = MultiPoly(VARS, {(1, 0): 2, (0, 1): 0})
    assert p.terms == {(1, 0): Fraction(2)}
    assert (x - x).terms == {}


def test_mismatched_variables_raise():
    other = MultiPoly.variable("z", ("z", "w"))
    with pytest.raises(VariableMismatchError):
        _ = x + other


def test_diff_and_degree():
    p = x**3 * y - 2 * y
    assert p.degree == 4
    assert p.diff("x") == 3 * x**2 * y
    assert p.diff("y") == x**3 - 2


def test_compose_substitutes_each_variable():
    p = x * y
    composed = p.compose([x + y, x - y])
    assert composed == x**2 - y**2


def test_linear_substitute_by_a_rotation_keeps_norm():
    norm2 = x**2 + y**2
    assert norm2.linear_substitute([[0, -1], [1, 0]]) == norm2


def test_text_format_is_read_back():
    p = Fraction(1, 3) * x**2 - 4 * x * y + 7
    assert MultiPoly.from_text(p.to_text(), VARS) == p


def test_from_text_rejects_malformed_terms():
    with pytest.raises(ValueError):
        MultiPoly.from_text("2,0", VARS)


def test_exponents_and_products_of_degree():
    assert len(list(exponents_of_degree(3, 2))) == 6
    products = dict(products_of_degree([x**2 + y**2, x * y], 4))
    assert set(products) == {(2, 0), (1, 1), (0, 2)}
    assert products[(0, 2)] == x**2 * y**2


def test_embed_into_more_variables():
    p = monomial((1, 2), VARS).embed(("y", "z", "x"))
    assert p.terms == {(2, 0, 1): Fraction(1)}


def test_poisson_bracket_of_canonical_pair():
    names = ("q", "p")
    q, p = MultiPoly.gens(names)
    assert poly_poisson_bracket(q, p, ["q"], ["p"]) == 1
    assert poly_poisson_bracket(q * p, q, ["q"], ["p"]) == -q
