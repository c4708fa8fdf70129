"""Engines for the polynomial sequences h_n, h'_n attached to the M system.

``h_n(a; q)`` is computed three ways (three-term recurrence, tridiagonal
determinant, fermionic double sum) and ``h'_n(a; q)`` two ways (from the
colored generating function, and from its relation to ``h``).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .. import colored
from ..errors import InexactDivision, TruncationTooLow
from ..qseries import Polynomial, QSeries, Substitution, pochhammer_poly, qbinom

_q = Polynomial.q
_a = Polynomial.marker

GENERAL = "general"
B_EQ_AQ = "b_eq_aq"


@lru_cache(maxsize=None)
def _h_aq(n: int) -> Polynomial:
    if n <= 0:
        return Polynomial.constant(0)
    if n == 1:
        return Polynomial.constant(1)
    a = _a("a")
    return (1 + a * _q(n)) * _h_aq(n - 1) - a * a * _q(2 * n - 1) * _h_aq(n - 2)


def h_via_recurrence(n: int, mode: str = B_EQ_AQ, order: int | None = None):
    """h_n by its three-term recurrence.

    ``mode="b_eq_aq"`` returns the polynomial h_n(a; q).  ``mode="general"``
    divides exactly by (1 - b q^(n-1)) at every step and raises
    ``InexactDivision`` on a remainder.  For generic b that already happens
    at n = 2, since h^M_2 = (1 - ab q^3)/(1 - b q); pass ``order`` to get
    h^M_n(a, b; q) as a truncated series instead.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if mode == B_EQ_AQ:
        return _h_aq(n)
    if mode != GENERAL:
        raise ValueError(f"unknown mode {mode!r}")
    a, b = _a("a"), _a("b")
    if order is None:
        prev, cur = Polynomial.constant(0), Polynomial.constant(1)
        if n == 0:
            return prev
        for k in range(2, n + 1):
            num = (1 - a * b * _q(2 * k - 1)) * cur - a * b * _q(2 * k - 2) * (1 - a * _q(k)) * prev
            prev, cur = cur, divide_one_minus(num, (0, 1, 0), k - 1)
        return cur
    prev, cur = QSeries.zero(order), QSeries.one(order)
    if n == 0:
        return prev
    for k in range(2, n + 1):
        num = (1 - a * b * _q(2 * k - 1)).to_series(order) * cur \
            - (a * b * _q(2 * k - 2) * (1 - a * _q(k))).to_series(order) * prev
        prev, cur = cur, num / (1 - b * _q(k - 1)).to_series(order)
    return cur


def divide_one_minus(p: Polynomial, marker: tuple, e: int) -> Polynomial:
    """Exact quotient p / (1 - marker*q^e); raises ``InexactDivision`` on a remainder."""
    m = Polynomial.monomial(marker, e)
    deg = max((sum(mono) for mono, _, _ in p.terms()), default=0)
    # p = (1 - m) Q forces Q = p (1 + m + ... + m^deg) truncated below marker degree deg
    acc, power = p, p
    for _ in range(deg):
        power = power * m
        acc = acc + power
    quotient = Polynomial({(mono, qe): v for mono, qe, v in acc.terms() if sum(mono) < deg + (deg == 0)})
    if quotient * (1 - m) != p:
        raise InexactDivision(f"{p} is not divisible by 1 - {m}")
    return quotient


def _tridiagonal(n: int):
    """Diagonal, super- and sub-diagonal of the (n-1)x(n-1) matrix for h_n."""
    a = _a("a")
    size = n - 1
    diag = [1 + a * _q(i + 1) for i in range(1, size + 1)]
    sup = [a * a * _q(2 * i + 3) for i in range(1, size)]
    sub = [Polynomial.constant(1)] * (size - 1)
    return diag, sup, sub


def h_via_determinant(n: int, method: str = "continuant") -> Polynomial:
    """h_n(a; q) as the determinant of its tridiagonal matrix (n >= 2).

    ``method="expansion"`` sums the permutation expansion directly: the only
    permutations with non-zero product are disjoint adjacent transpositions.
    """
    if n < 2:
        raise ValueError("the determinant form needs n >= 2")
    diag, sup, sub = _tridiagonal(n)
    size = n - 1
    if method == "continuant":
        prev, cur = Polynomial.constant(1), diag[0]
        for k in range(1, size):
            prev, cur = cur, diag[k] * cur - sup[k - 1] * sub[k - 1] * prev
        return cur
    if method != "expansion":
        raise ValueError(f"unknown method {method!r}")
    total = Polynomial.constant(0)
    for swaps in _adjacent_matchings(size):
        term = Polynomial.constant(1)
        paired = set()
        for i in swaps:
            term = term * (-sup[i] * sub[i])
            paired.update((i, i + 1))
        for i in range(size):
            if i not in paired:
                term = term * diag[i]
        total = total + term
    return total


def _adjacent_matchings(size: int):
    """Sets of pairwise disjoint positions i (standing for the swap i <-> i+1)."""
    for k in range(size // 2 + 1):
        for combo in combinations(range(size - 1), k):
            if all(y - x >= 2 for x, y in zip(combo, combo[1:])):
                yield combo


def h_via_double_sum(n: int) -> Polynomial:
    """Fermionic double sum for h_n(a; q); ranges come from binomial vanishing."""
    total = Polynomial.constant(0)
    j = 0
    while n - 3 * j - 1 >= 0 or n - 3 * j >= 0:
        i = 0
        while True:
            first = qbinom(n - 2 * i - 3 * j, i)
            second = qbinom(n - i - 3 * j - 1, j, 3)
            if n - 2 * i - 3 * j < 0 and n - i - 3 * j - 1 < 0:
                break
            if first and second:
                e = i * (i + 1) + 3 * i * j + 9 * j * (j + 1) // 2
                term = Polynomial.monomial((i + 3 * j, 0, 0), e, (-1) ** j)
                total = total + term * Polynomial.from_qpoly(first * second)
            elif n - 2 * i - 3 * j < 0:
                break
            i += 1
        j += 1
    return total


def hprime_degree_bound(n: int) -> int:
    return (n + 1) * (n + 2) // 2 + 2


def hprime(n: int, route: str = "relation", order: int | None = None) -> Polynomial:
    """h'_n(a; q) by ``route="relation"`` or ``route="colored"``.

    The colored route multiplies (aq; q)_n by g^M_{b_n}(a, a; q) and checks
    that every coefficient between the degree bound and ``order`` vanishes.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if route == "relation":
        if n == 0:
            return Polynomial.constant(1)
        shifted = _h_aq(n - 1).substitute(Substitution.of(a=("a", 1)))
        a = _a("a")
        return _h_aq(n) - a * a * _q(3) * shifted
    if route != "colored":
        raise ValueError(f"unknown route {route!r}")
    bound = hprime_degree_bound(n)
    if order is None:
        order = bound + n + 6
    g = colored.series_bounded(colored.M, ("b", n), order, Substitution.of(b="a"))
    prod = pochhammer_poly(((1, 0, 0), 1), 1, n).to_series(order) * g
    last = max(i for i in range(order) if prod.coeff(i)) if not prod.is_zero() else -1
    if last >= min(bound + 1, order - 1) or order <= bound + 1:
        raise TruncationTooLow(
            f"h'_{n}: product does not terminate below q^{order} (last non-zero term q^{last})"
        )
    terms = {}
    for e in range(last + 1):
        for m, v in prod.coeff(e).terms():
            terms[(m, e)] = v
    return Polynomial(terms)
