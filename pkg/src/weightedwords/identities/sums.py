"""Direct evaluation of the finite double-sum = single-sum identities.

Each side is an exact integer q-polynomial.  Summation ranges are never
hand-set: a term is skipped as soon as one of its Gaussian binomials
vanishes, and a loop stops once the vanishing is permanent.
"""

from __future__ import annotations

from ..qseries import QPolynomial, pochhammer_poly, qbinom


def _double_sum(n: int, exponent, shift: int = 0) -> QPolynomial:
    """sum (-1)^j q^exponent(i,j) [m-i-3j over i]_q [m-i-2j-1 over j]_{q^3}, m = n - shift."""
    m = n - shift
    total = QPolynomial()
    j = 0
    while m - 3 * j - 1 >= 0:
        i = 0
        while m - 2 * i - 3 * j >= 0:
            first = qbinom(m - 2 * i - 3 * j, i)
            second = qbinom(m - i - 3 * j - 1, j, 3)
            if second:
                total = total + (first * second).shift(exponent(i, j)) * (-1) ** j
            i += 1
        j += 1
    return total


def _e_main(i, j):
    return i * i + 3 * i * j + 3 * j * (3 * j + 1) // 2


def _e_fermionic(i, j):
    return i * (i + 1) + 3 * i * j + 9 * j * (j + 1) // 2


def _e_big(i, j):
    return i * (i + 2) + 3 * i * j + 9 * j * (j + 1) // 2 + 3 * j + 3


def _single_sum(n: int, exponent, base_exp: int, bottom) -> QPolynomial:
    """sum_j q^exponent(j) (q^base_exp; q^3)_j [n over bottom(j)]_q."""
    total = QPolynomial()
    j = 0
    while bottom(j) <= n:
        k = bottom(j)
        binom = qbinom(n - k, k)
        if binom:
            poch = pochhammer_poly(((0, 0, 0), base_exp), 3, j).to_qpolynomial()
            total = total + (poch * binom).shift(exponent(j))
        j += 1
    return total


def eq_sum1_lhs(n: int) -> QPolynomial:
    return _double_sum(n, _e_main)


def eq_sum1_rhs(n: int) -> QPolynomial:
    return _single_sum(n, lambda j: j * (3 * j + 1), 2, lambda j: 3 * j + 1)


def eq_sum2_lhs(n: int) -> QPolynomial:
    return _double_sum(n, _e_main) - _double_sum(n, _e_fermionic, 1).shift(1)


def eq_sum2_rhs(n: int) -> QPolynomial:
    return _single_sum(n, lambda j: j * (3 * j - 1), 1, lambda j: 3 * j)


def eq_sum3_lhs(n: int) -> QPolynomial:
    return _double_sum(n, _e_fermionic) - _double_sum(n, _e_big, 1)


def eq_sum3_rhs(n: int) -> QPolynomial:
    # j = 0 in the first sum has bottom -1 and vanishes
    return _single_sum(n, lambda j: j * (3 * j - 1), 1, lambda j: 3 * j - 1) + \
        _single_sum(n, lambda j: j * (3 * j + 2), 1, lambda j: 3 * j)


SUMS = {
    "eq_sum1": (eq_sum1_lhs, eq_sum1_rhs),
    "eq_sum2": (eq_sum2_lhs, eq_sum2_rhs),
    "eq_sum3": (eq_sum3_lhs, eq_sum3_rhs),
}
