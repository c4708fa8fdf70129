import pytest
from hypothesis import given, settings, strategies as st

from weightedwords.dsl import ast as A
from weightedwords.dsl.ast import unparse
from weightedwords.dsl.evaluator import AUTO_HARD_CAP, Evaluator, evaluate, proven_upper_bound
from weightedwords.dsl.parser import parse
from weightedwords.errors import (DSLEvalError, DSLSyntaxError, NegativeExponent, NotAUnit,
                                  UnknownIdentifier)
from weightedwords.identities import registry
from weightedwords.qseries import Polynomial, QSeries, geometric

# -- parsing ------------------------------------------------------------------


def test_parse_weighted_mm_product_side():
    e = parse("poch(a*q^2, 3, inf, inv) * poch(q, 1, inf, inv)")
    assert isinstance(e, A.BinOp) and e.op == "*"
    left, right = e.left, e.right
    assert left.inverse and left.count is None and left.step == A.Int(3)
    assert right.base == A.Name("q")


def test_parse_qbin_arguments():
    e = parse("qbin(n-i-3*j, i, 1)")
    assert isinstance(e, A.QBin)
    assert unparse(e.top) == "n - i - 3 * j"
    assert e.bottom == A.Name("i")


def test_unclosed_call_reports_column_six():
    with pytest.raises(DSLSyntaxError) as info:
        parse("poch(")
    assert (info.value.line, info.value.column) == (1, 6)
    assert info.value.expected


def test_precedence_and_associativity():
    assert parse("1 - 2 - 3") == parse("(1 - 2) - 3")
    assert parse("-q^2") == A.Neg(A.Pow(A.Name("q"), A.Int(2)))
    assert parse("a*b/c") == parse("(a*b)/c")


def test_subst_and_census_options():
    e = parse("subst(glimit(M); b->1, a->q^-1, q->q^2)")
    assert [m for m, _ in e.images] == ["a", "b"]
    assert e.q_power == 2
    assert unparse(e) == "subst(glimit(M); a->q^-1, b->1, q->q^2)"
    c = parse("census(macmahon_gap; a=odd, b=mod3_2)")
    assert c.markers == (("a", "odd"), ("b", "mod3_2"))


def test_positions_survive_but_do_not_affect_equality():
    e1, e2 = parse("a +  b"), parse("a+b")
    assert e1 == e2
    assert e1.pos == (1, 3)


def test_builtin_registry_round_trips():
    for entry in registry.builtin():
        for side in (entry.lhs,) + entry.rhs:
            assert parse(unparse(side)) == side, entry.name


ERROR_CORPUS = [
    "poch(",
    "poch(q, 1)",
    "poch(q, 1, inf, inverse)",
    "qbin(n, )",
    "gseries(M, a)",
    "gseries(M a, 3)",
    "glimit()",
    "subst(glimit(M))",
    "subst(glimit(M); d->1)",
    "subst(glimit(M); a->2)",
    "subst(glimit(M); a->a*b)",
    "subst(glimit(M); a->1, a->0)",
    "subst(glimit(M); q->q^0)",
    "sum(i, 0, auto)",
    "sum(i, 0, , q^i)",
    "hseq(fast, 3)",
    "census(macmahon_gap; a)",
    "census(macmahon_gap; z=odd)",
    "frobnicate(q)",
    "q^",
    "q^^2",
    "(a + b",
    "a + b)",
    "a $ b",
    "1 +\n  * 2",
    "",
    "a b",
]


@pytest.mark.parametrize("text", ERROR_CORPUS)
def test_error_corpus_gives_positioned_syntax_errors(text):
    with pytest.raises(DSLSyntaxError) as info:
        parse(text)
    assert info.value.line >= 1 and info.value.column >= 1


def test_multiline_error_position():
    with pytest.raises(DSLSyntaxError) as info:
        parse("1 +\n  * 2")
    assert (info.value.line, info.value.column) == (2, 3)


# random well-formed trees round-trip through text

names = st.sampled_from(["a", "b", "c", "q", "n", "i"]).map(A.Name)
ints = st.integers(0, 50).map(A.Int)
leaves = st.one_of(names, ints)


def _extend(children):
    return st.one_of(
        st.builds(A.BinOp, st.sampled_from(["+", "-", "*", "/"]), children, children),
        st.builds(A.Neg, children),
        st.builds(A.Pow, children, st.one_of(ints, names, st.builds(A.Neg, ints))),
        st.builds(A.QBin, children, children, children),
        st.builds(A.Poch, children, children, st.one_of(st.none(), children), st.booleans()),
        st.builds(A.Sum, st.sampled_from(["i", "j"]), children, st.one_of(st.none(), children), children),
        st.builds(A.GSeries, st.sampled_from(["M", "R"]), st.sampled_from(["a", "b"]), children),
        st.builds(A.HSeq, st.sampled_from(["recurrence", "prime"]), children),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_random_trees_round_trip(tree):
    assert parse(unparse(tree)) == tree


# -- evaluation ---------------------------------------------------------------

def test_evaluate_initial_value_series():
    s = evaluate("gseries(M, b, 1)", order=5)
    assert str(s) == "1 + b*q + b^2*q^2 + b^3*q^3 + b^4*q^4 + O(q^5)"
    assert s == geometric("b", 1, 5)


def test_evaluate_constant():
    for order in (1, 7, 40):
        assert evaluate("1", order=order) == 1


def test_weighted_mm_difference_vanishes():
    diff = evaluate("subst(glimit(M); b->1) - poch(a*q^2, 3, inf, inv) * poch(q, 1, inf, inv)", order=40)
    assert isinstance(diff, QSeries) and diff.is_zero()


def test_exact_values_stay_polynomial():
    v = evaluate("(1 - q)^3 * qbin(3, 1)")
    assert isinstance(v, Polynomial)
    assert evaluate("6 / 3") == 2
    assert isinstance(evaluate("1 / (1 - q)", order=6), QSeries)


def test_evaluation_errors():
    with pytest.raises(UnknownIdentifier):
        evaluate("n + 1")
    with pytest.raises(UnknownIdentifier):
        evaluate("gseries(X, a, 2)")
    with pytest.raises(NegativeExponent):
        evaluate("q^-1")
    with pytest.raises(DSLEvalError):
        evaluate("1 / 2")
    with pytest.raises(NotAUnit):
        evaluate("1 / (2 - q)")
    with pytest.raises(DSLEvalError):
        evaluate("hseq(recurrence, 0 - 1)")


def test_bindings_and_sums():
    assert evaluate("sum(i, 1, n, i)", {"n": 10}) == 55
    # auto bound proved from the binomial: i <= n - i
    v = evaluate("sum(i, 0, auto, q^(i^2) * qbin(n-i, i))", {"n": 6})
    assert v == evaluate("sum(i, 0, 3, q^(i^2) * qbin(n-i, i))", {"n": 6})


def test_proven_bounds_for_nested_sums():
    node = parse("sum(j, 0, auto, sum(i, 0, auto, qbin(n-i-3*j, i) * qbin(n-i-2*j-1, j, 3)))")
    assert proven_upper_bound(node, {"n": 10}) == 3
    assert proven_upper_bound(node.body, {"n": 10, "j": 1}) == 3
    assert proven_upper_bound(parse("sum(i, 0, auto, q^i)"), {}) is None


def test_auto_sum_fallback_stops_on_a_zero_run():
    # a sum of binomials is not a product, so no bound is proved; the run of zeros ends it
    node = parse("sum(i, 0, auto, qbin(3 - i, i) + 0)")
    assert proven_upper_bound(node, {}) is None
    assert evaluate(node) == 2 + Polynomial.q(1)


def test_auto_sum_without_termination_raises():
    with pytest.raises(DSLEvalError):
        evaluate("sum(i, 0, auto, i + 1)")
    assert AUTO_HARD_CAP == 2000


def test_subst_pushdown_matches_generic_substitution():
    ev = Evaluator(30)
    pushed = ev("subst(gseries(M, b, 6); a->q, b->1)")
    generic = ev("subst(gseries(M, b, 6) + 0 * q; a->q, b->1)")
    assert pushed == generic


def test_evaluation_is_deterministic():
    text = "subst(glimit(R); c->1) * poch(q, 1, inf)"
    assert str(evaluate(text, order=20)) == str(evaluate(text, order=20))


def test_census_from_the_language():
    s = evaluate("census(macmahon_gap)", order=10)
    # (4), (2,2) at n = 4; (6), (4,2), (3,3), (2,2,2) at n = 6
    assert s.counts()[:7] == [1, 0, 1, 1, 2, 1, 4]
    with pytest.raises(UnknownIdentifier):
        evaluate("census(nope)", order=5)
