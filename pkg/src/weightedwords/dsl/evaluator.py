"""Evaluate relation-language trees to exact values.

Values are Python ints, exact ``Polynomial`` objects, or truncated
``QSeries``.  Sums and products stay exact as long as no operand is a
series; division by anything other than +-1 turns the result into a
series at the requested truncation order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .. import colored, partitions
from ..errors import DSLEvalError, NegativeExponent, UnknownIdentifier
from ..identities import hseq
from ..qseries import (INF, MarkerImage, Polynomial, QSeries, Substitution, ZERO, pochhammer,
                       pochhammer_poly, qbinom, substitute)
from .ast import (BinOp, Census, Expr, GLimit, GSeries, HSeq, Int, Name, Neg, Poch, Pow,
                  QBin, Subst, Sum)
from .parser import MARKERS, parse

AUTO_ZERO_RUN = 8
AUTO_HARD_CAP = 2000

Value = object  # int | Polynomial | QSeries


def is_zero(v) -> bool:
    if isinstance(v, QSeries):
        return v.is_zero()
    return not v


def as_series(v, order: int) -> QSeries:
    if isinstance(v, QSeries):
        return v
    if isinstance(v, int):
        return QSeries([v], order, density=None)
    return v.to_series(order)


def _promote(x, y, order):
    """Bring two values to a common type."""
    if isinstance(x, QSeries) or isinstance(y, QSeries):
        o = min(s.order for s in (x, y) if isinstance(s, QSeries))
        return as_series(x, o), as_series(y, o)
    if isinstance(x, Polynomial) or isinstance(y, Polynomial):
        return _as_poly(x), _as_poly(y)
    return x, y


def _as_poly(v) -> Polynomial:
    return Polynomial.constant(v) if isinstance(v, int) else v


def add(x, y, order):
    x, y = _promote(x, y, order)
    return x + y


def sub(x, y, order):
    x, y = _promote(x, y, order)
    return x - y


def mul(x, y, order):
    x, y = _promote(x, y, order)
    return x * y


def div(x, y, order):
    if isinstance(y, int) or (isinstance(y, Polynomial) and y.as_monomial() and y.as_monomial()[1:] == (0, 0)):
        c = y if isinstance(y, int) else y.as_monomial()[0]
        if c in (1, -1):
            return mul(x, c, order)
        if isinstance(x, int) and c and x % c == 0:
            return x // c
        raise DSLEvalError(f"division by {c} is not exact in the integers")
    x, y = as_series(x, order), as_series(y, order)
    return x / y


def power(base, k: int, order: int):
    if k < 0:
        return div(1, power(base, -k, order), order)
    return base ** k


def _int(v, what: str, pos) -> int:
    if isinstance(v, int):
        return v
    if isinstance(v, Polynomial) and (not v or (v.as_monomial() and v.as_monomial()[1:] == (0, 0))):
        return v.as_monomial()[0] if v else 0
    raise DSLEvalError(f"{what} must be an integer{_at(pos)}")


def _at(pos) -> str:
    return f" (line {pos[0]}, column {pos[1]})" if pos else ""


def _substitution(node: Subst) -> Substitution:
    images = {}
    for m, img in node.images:
        images[m] = ZERO if img.zero else MarkerImage(img.target, img.shift)
    return Substitution.of(q=node.q_power, **images)


class Evaluator:
    """Evaluates trees at a fixed truncation order.

    Colored generating series share one incremental DP per system, order
    and substitution, so every bound a relation touches costs one pass.
    """

    def __init__(self, order: int, systems: Optional[dict] = None):
        if order < 1:
            raise DSLEvalError("truncation order must be positive")
        self.order = order
        self.systems = dict(colored.BUILTIN)
        if systems:
            self.systems.update(systems)
        self._cache: dict = {}

    def __call__(self, node, env: Optional[dict] = None, order: Optional[int] = None):
        if isinstance(node, str):
            node = parse(node)
        return self.eval(node, dict(env or {}), order or self.order)

    def eval(self, node: Expr, env: dict, order: int):
        method = getattr(self, "_" + type(node).__name__.lower())
        return method(node, env, order)

    # -- leaves --
    def _int(self, node: Int, env, order):
        return node.value

    def _name(self, node: Name, env, order):
        if node.ident in env:
            return env[node.ident]
        if node.ident in MARKERS:
            return Polynomial.marker(node.ident)
        if node.ident == "q":
            return Polynomial.q(1)
        raise UnknownIdentifier(f"unbound name {node.ident!r}{_at(node.pos)}")

    # -- arithmetic --
    def _neg(self, node: Neg, env, order):
        return -self.eval(node.operand, env, order)

    def _binop(self, node: BinOp, env, order):
        x = self.eval(node.left, env, order)
        y = self.eval(node.right, env, order)
        return {"+": add, "-": sub, "*": mul, "/": div}[node.op](x, y, order)

    def _pow(self, node: Pow, env, order):
        k = _int(self.eval(node.exponent, env, order), "an exponent", node.pos)
        if isinstance(node.base, Name) and node.base.ident == "q" and "q" not in env:
            if k < 0:
                raise NegativeExponent(f"q^{k}{_at(node.pos)}")
            return Polynomial.q(k)
        return power(self.eval(node.base, env, order), k, order)

    # -- q-series constructions --
    def _poch(self, node: Poch, env, order):
        base = _as_poly(self.eval(node.base, env, order))
        step = _int(self.eval(node.step, env, order), "a Pochhammer step", node.pos)
        count = INF if node.count is None else _int(self.eval(node.count, env, order), "a Pochhammer count", node.pos)
        if count is not None and count < 0:
            raise DSLEvalError(f"negative Pochhammer count {count}{_at(node.pos)}")
        if count is not None and not node.inverse:
            return pochhammer_poly(base, step, count)
        return pochhammer(base, step, count, order, inverse=node.inverse)

    def _qbin(self, node: QBin, env, order):
        top = _int(self.eval(node.top, env, order), "a q-binomial argument", node.pos)
        bottom = _int(self.eval(node.bottom, env, order), "a q-binomial argument", node.pos)
        step = _int(self.eval(node.step, env, order), "a q-binomial step", node.pos)
        return Polynomial.from_qpoly(qbinom(top - bottom, bottom, step))

    def _system(self, name: str, pos):
        try:
            return self.systems[name]
        except KeyError:
            raise UnknownIdentifier(f"unknown transition system {name!r}{_at(pos)}") from None

    def _colored(self, node, env, order, sub: Optional[Substitution]):
        ts = self._system(node.system, node.pos)
        if isinstance(node, GSeries):
            level = _int(self.eval(node.level, env, order), "a level", node.pos)
            ts.index(node.color)
            if level <= 0:
                return 1
            key = (ts.name, order, sub)
            if key not in self._cache:
                self._cache[key] = colored.BoundedFamily(ts, order, sub)
            return self._cache[key].series((node.color, level))
        key = (ts.name, None, None, order, sub)
        if key not in self._cache:
            self._cache[key] = colored.series_limit(ts, order, sub)
        return self._cache[key]

    def _gseries(self, node: GSeries, env, order):
        return self._colored(node, env, order, None)

    def _glimit(self, node: GLimit, env, order):
        return self._colored(node, env, order, None)

    def _subst(self, node: Subst, env, order):
        s = _substitution(node)
        if isinstance(node.operand, (GSeries, GLimit)):
            # specialise inside the DP: no truncation is lost
            return self._colored(node.operand, env, order, s)
        inner = self.eval(node.operand, env, order)
        if isinstance(inner, int):
            return inner
        if isinstance(inner, Polynomial):
            return inner.substitute(s)
        need = s.input_order(order, inner.density)
        if need > inner.order:
            inner = self.eval(node.operand, env, need)
        return substitute(inner, s, min(order, s.output_order(inner.order, inner.density)))

    def _hseq(self, node: HSeq, env, order):
        n = _int(self.eval(node.n, env, order), "an h-sequence index", node.pos)
        if n < 0:
            raise DSLEvalError(f"negative h-sequence index {n}{_at(node.pos)}")
        if node.route == "recurrence":
            return hseq.h_via_recurrence(n)
        if node.route == "general":
            return hseq.h_via_recurrence(n, hseq.GENERAL, order)
        if node.route == "determinant":
            return hseq.h_via_determinant(n)
        if node.route == "double_sum":
            return hseq.h_via_double_sum(n)
        if node.route == "prime":
            return hseq.hprime(n, "relation")
        return hseq.hprime(n, "colored")

    def _census(self, node: Census, env, order):
        try:
            return partitions.census_by_name(node.family, order, dict(node.markers))
        except KeyError as exc:
            raise UnknownIdentifier(f"{exc.args[0]}{_at(node.pos)}") from None

    # -- finite sums --
    def _sum(self, node: Sum, env, order):
        lo = _int(self.eval(node.lower, env, order), "a summation bound", node.pos)
        total = 0
        if node.upper is not None:
            hi = _int(self.eval(node.upper, env, order), "a summation bound", node.pos)
            for v in range(lo, hi + 1):
                total = add(total, self.eval(node.body, {**env, node.index: v}, order), order)
            return total
        hi = proven_upper_bound(node, env)
        if hi is not None:
            for v in range(lo, hi + 1):
                total = add(total, self.eval(node.body, {**env, node.index: v}, order), order)
            return total
        zeros, v = 0, lo
        while zeros < AUTO_ZERO_RUN:
            if v - lo > AUTO_HARD_CAP:
                raise DSLEvalError(f"sum over {node.index} did not terminate within {AUTO_HARD_CAP} terms{_at(node.pos)}")
            term = self.eval(node.body, {**env, node.index: v}, order)
            zeros = zeros + 1 if is_zero(term) else 0
            total = add(total, term, order)
            v += 1
        return total


# -- termination proofs for auto bounds ---------------------------------------

def linear_form(node, env) -> Optional[dict]:
    """``node`` as {var: coeff, 1: const} if it is affine in unbound names."""
    if isinstance(node, Int):
        return {1: node.value}
    if isinstance(node, Name):
        if node.ident in env and isinstance(env[node.ident], int):
            return {1: env[node.ident]}
        if node.ident in MARKERS or node.ident == "q":
            return None
        return {node.ident: 1}
    if isinstance(node, Neg):
        f = linear_form(node.operand, env)
        return None if f is None else {k: -v for k, v in f.items()}
    if isinstance(node, BinOp) and node.op in ("+", "-", "*"):
        x, y = linear_form(node.left, env), linear_form(node.right, env)
        if x is None or y is None:
            return None
        if node.op == "*":
            if set(x) == {1}:
                return {k: x[1] * v for k, v in y.items()}
            if set(y) == {1}:
                return {k: y[1] * v for k, v in x.items()}
            return None
        sign = 1 if node.op == "+" else -1
        out = dict(x)
        for k, v in y.items():
            out[k] = out.get(k, 0) + sign * v
        return out
    return None


def _factors(node):
    """Multiplicative factors of a product chain."""
    if isinstance(node, BinOp) and node.op == "*":
        return _factors(node.left) + _factors(node.right)
    if isinstance(node, Neg):
        return _factors(node.operand)
    return [node]


def proven_upper_bound(node: Sum, env) -> Optional[int]:
    """Largest index value that can contribute, proved from q-binomial arguments.

    A factor qbin(top, bottom) vanishes when bottom < 0 or top - bottom < 0.
    Each of those two forms that decreases in the index (with every inner
    summation index entering with a non-positive coefficient) bounds it.
    """
    var = node.index
    bounds = []

    def visit(body, inner_lows):
        for f in _factors(body):
            if isinstance(f, Sum):
                lo = linear_form(f.lower, env)
                if lo is not None and set(lo) == {1}:
                    visit(f.body, {**inner_lows, f.index: lo[1]})
            elif isinstance(f, QBin):
                top, bottom = linear_form(f.top, env), linear_form(f.bottom, env)
                if top is None or bottom is None:
                    continue
                diff = {k: top.get(k, 0) - bottom.get(k, 0) for k in set(top) | set(bottom)}
                for form in (bottom, diff):
                    b = _bound_from(form, var, inner_lows)
                    if b is not None:
                        bounds.append(b)

    visit(node.body, {})
    return min(bounds) if bounds else None


def _bound_from(form: dict, var: str, inner_lows: dict) -> Optional[int]:
    alpha = form.get(var, 0)
    if alpha >= 0:
        return None
    const = Fraction(form.get(1, 0))
    for k, v in form.items():
        if k in (1, var):
            continue
        if k not in inner_lows or v > 0:
            return None
        const += v * inner_lows[k]
    # alpha * var + const >= 0 is needed for a non-zero term
    return int((const / -alpha).__floor__())


def evaluate(text_or_node, env: Optional[dict] = None, order: int = 20, systems=None):
    """One-shot evaluation at truncation ``order``."""
    return Evaluator(order, systems)(text_or_node, env)
