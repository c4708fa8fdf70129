from fractions import Fraction
from itertools import product
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from weightedwords.errors import (DivergentProduct, InsufficientTruncation, NegativeExponent,
                                  NotAUnit)
from weightedwords.qseries import (MarkerMonomial, MarkerPoly, Polynomial, QPolynomial, QSeries,
                                   Substitution, geometric, pochhammer, pochhammer_poly,
                                   qbinom, substitute)


def box_counts(rows, cols):
    """Coefficients of the partitions fitting in a rows x cols box, by size."""
    counts = [0] * (rows * cols + 1)
    # a partition in the box is a non-increasing sequence of `rows` values in 0..cols
    def rec(i, cap, total):
        if i == rows:
            counts[total] += 1
            return
        for v in range(cap + 1):
            rec(i + 1, v, total + v)
    rec(0, cols, 0)
    return counts


# -- q-binomials --------------------------------------------------------------

@pytest.mark.parametrize("a,b", [(a, b) for a in range(7) for b in range(7)])
def test_qbinom_counts_box_partitions(a, b):
    assert list(qbinom(a, b).coeffs) == box_counts(b, a)


@pytest.mark.parametrize("n", range(1, 12))
def test_qbinom_pascal_rules(n):
    for k in range(1, n):
        left = qbinom(n - k, k)
        # [n,k] = [n-1,k-1] + q^k [n-1,k]  and  [n,k] = q^(n-k) [n-1,k-1] + [n-1,k]
        assert left == qbinom(n - k, k - 1) + qbinom(n - k - 1, k).shift(k)
        assert left == qbinom(n - k, k - 1).shift(n - k) + qbinom(n - k - 1, k)


@pytest.mark.parametrize("n", range(0, 14))
def test_qbinom_at_q_equal_one_is_binomial(n):
    for k in range(n + 1):
        assert qbinom(n - k, k)(1) == comb(n, k)


def test_qbinom_vanishes_out_of_range():
    assert not qbinom(-1, 3)
    assert not qbinom(3, -1)
    assert qbinom(0, 0) == QPolynomial([1])


def test_qbinom_step_stretches():
    assert qbinom(2, 1, 3) == qbinom(2, 1).stretch(3)
    assert list(qbinom(1, 1, 3).coeffs) == [1, 0, 0, 1]


def test_qbinom_matches_pochhammer_ratio():
    # [n over k] (q;q)_k (q;q)_(n-k) = (q;q)_n
    q = Polynomial.q(1)
    for n in range(8):
        for k in range(n + 1):
            lhs = (Polynomial.from_qpoly(qbinom(n - k, k)) * pochhammer_poly(q, 1, k)
                   * pochhammer_poly(q, 1, n - k))
            assert lhs == pochhammer_poly(q, 1, n)


# -- Pochhammer symbols -------------------------------------------------------

def test_euler_pentagonal_numbers():
    s = pochhammer(Polynomial.q(1), 1, None, 30)
    pent = {}
    for k in range(-6, 7):
        pent[k * (3 * k - 1) // 2] = (-1) ** k
    assert s.counts() == [pent.get(i, 0) for i in range(30)]


def test_partition_numbers_from_inverse_product():
    s = pochhammer(Polynomial.q(1), 1, None, 15, inverse=True)
    assert s.counts() == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135]


@pytest.mark.parametrize("count", [0, 1, 3, 7, None])
def test_pochhammer_times_inverse_is_one(count):
    base = Polynomial.monomial((1, 0, 0), 2)
    p = pochhammer(base, 3, count, 25)
    inv = pochhammer(base, 3, count, 25, inverse=True)
    assert p * inv == QSeries.one(25)


def test_finite_pochhammer_poly_matches_series():
    base = Polynomial.monomial((0, 1, 0), 1, -1)
    assert pochhammer_poly(base, 2, 4).to_series(20) == pochhammer(base, 2, 4, 20)


def test_infinite_product_needs_positive_valuation():
    with pytest.raises(DivergentProduct):
        pochhammer(Polynomial.marker("a"), 1, None, 10)


# -- series arithmetic -------------------------------------------------------

def test_geometric_series():
    s = geometric("b", 1, 5)
    assert str(s) == "1 + b*q + b^2*q^2 + b^3*q^3 + b^4*q^4 + O(q^5)"


def test_division_requires_unit_constant_term():
    with pytest.raises(NotAUnit):
        QSeries.one(5) / QSeries([2, 1], 5)
    with pytest.raises(NotAUnit):
        QSeries.one(5) / QSeries([MarkerPoly({(1, 0, 0): 1})], 5)


def test_truncation_is_the_smaller_order():
    s = QSeries([1, 1, 1], 3) * QSeries([1, 1, 1, 1, 1], 5)
    assert s.order == 3
    with pytest.raises(InsufficientTruncation):
        s.truncate(4)


def test_negative_q_exponent_rejected():
    with pytest.raises(NegativeExponent):
        Polynomial({((0, 0, 0), -1): 1})


# -- substitution -------------------------------------------------------------

def test_substitution_of_polynomial():
    a, q = Polynomial.marker("a"), Polynomial.q(1)
    p = a * q ** 3 + Polynomial.marker("b") * q
    sub = Substitution.of(a=("a", -1), b=0)
    assert p.substitute(sub) == a * q ** 2


def test_substitution_to_negative_power_is_an_error():
    p = Polynomial.marker("a") * Polynomial.q(1)
    with pytest.raises(NegativeExponent):
        p.substitute(Substitution.of(a=(None, -2)))


def test_series_substitution_order_bookkeeping():
    # 1/(1 - a q^2) with a -> q^-1 is 1/(1-q); density 2 per a makes it safe
    s = geometric("a", 2, 20)
    out = substitute(s, Substitution.of(a=(None, -1)))
    assert out.order == 10
    assert out.counts() == [1] * 10
    with pytest.raises(InsufficientTruncation):
        substitute(s, Substitution.of(a=(None, -1)), 15)


def test_substitution_with_q_power():
    s = geometric("a", 1, 10)
    out = substitute(s, Substitution.of(q=2, a=1))
    assert out.counts() == [1, 0] * 10


# -- property tests -----------------------------------------------------------

exps = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
polys = st.dictionaries(st.tuples(exps, st.integers(0, 6)), st.integers(-3, 3), max_size=5).map(Polynomial)
subs = st.builds(
    lambda ia, ib, qp: Substitution.of(q=qp, a=ia, b=ib),
    st.sampled_from([1, 0, ("a", 0), ("a", 1), ("b", 2), (None, 1)]),
    st.sampled_from([1, 0, ("b", 0), ("a", 1), (None, 2)]),
    st.integers(1, 3),
)


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_polynomial_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == Polynomial()
    assert x * 1 == x


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_series_arithmetic_matches_polynomials(x, y):
    order = 9
    assert (x * y).to_series(order) == x.to_series(order) * y.to_series(order)
    assert (x + y).to_series(order) == x.to_series(order) + y.to_series(order)


@settings(max_examples=60, deadline=None)
@given(polys, st.integers(1, 4), exps)
def test_division_inverts_multiplication(x, m, marker):
    order = 12
    unit = 1 - Polynomial.monomial(marker, m)
    s = x.to_series(order)
    assert (s / unit.to_series(order)) * unit.to_series(order) == s


@settings(max_examples=60, deadline=None)
@given(polys, polys, subs)
def test_substitution_is_a_ring_homomorphism(x, y, sub):
    assert (x * y).substitute(sub) == x.substitute(sub) * y.substitute(sub)
    assert (x + y).substitute(sub) == x.substitute(sub) + y.substitute(sub)


@settings(max_examples=60, deadline=None)
@given(polys, subs)
def test_series_and_polynomial_substitution_agree(x, sub):
    s = substitute(x.to_series(10), sub)
    assert s == x.substitute(sub).to_series(s.order)


@settings(max_examples=40, deadline=None)
@given(polys, st.integers(-2, 2), st.integers(-2, 2))
def test_evaluation_is_a_homomorphism(x, qv, av):
    y = x * x + x
    assert y.evaluate(q=qv, a=av) == x.evaluate(q=qv, a=av) ** 2 + x.evaluate(q=qv, a=av)


def test_marker_keys_round_trip():
    for e in product(range(3), repeat=3):
        assert MarkerMonomial.from_key(MarkerMonomial(*e).key) == MarkerMonomial(*e)


def test_density_of_pochhammer_series():
    assert pochhammer(Polynomial.monomial((1, 0, 0), 2), 3, None, 10).density == Fraction(2)
    assert pochhammer(Polynomial.q(1), 1, None, 10).density is None
    assert geometric("a", 3, 10).density == Fraction(3)
