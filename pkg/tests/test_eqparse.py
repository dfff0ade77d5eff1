import itertools

import pytest
from hypothesis import given, settings, strategies as st

from diophcount.algebra import Polynomial
from diophcount.eqparse import (
    Const,
    Kind,
    Negate,
    Power,
    Var,
    compile_expr,
    evaluate,
    expand_polynomial,
    fold,
    format_expr,
    parse_equation,
    parse_expression,
    parse_system,
)
from diophcount.errors import (
    EquationSyntaxError,
    NotAlgebraic,
    UnknownVariable,
    UnsupportedConstruct,
)


def poly(terms, k):
    return Polynomial(terms, k)


def test_circle_is_algebraic_quadratic():
    eq = parse_equation("x1^2 + x2^2 = 25")
    assert eq.kind is Kind.ALGEBRAIC
    assert (eq.k, eq.degree) == (2, 2)


def test_exponential_sum_is_non_algebraic():
    eq = parse_equation("2^x1 + 3^x2 = 5^x3")
    assert eq.kind is Kind.NON_ALGEBRAIC
    assert eq.k == 3
    assert eq.degree is None


def test_syntax_error_offset():
    with pytest.raises(EquationSyntaxError) as info:
        parse_equation("x1 + = 3")
    assert info.value.position == 5
    assert "offset 5" in str(info.value)


@pytest.mark.parametrize("text, cls", [
    ("2x1 = 3", EquationSyntaxError),  # no implicit multiplication
    ("x1 = ", EquationSyntaxError),
    ("x1 + x2", EquationSyntaxError),
    ("x1 = 2 = 3", EquationSyntaxError),
    ("(x1 + 1 = 2", EquationSyntaxError),
    ("x1 $ 2 = 0", EquationSyntaxError),
    ("x1 / 2 = 1", UnsupportedConstruct),
    ("x1 % 2 = 1", UnsupportedConstruct),
    ("sin(x1) = 0", UnsupportedConstruct),
    ("cosh(x1) = 1", UnsupportedConstruct),
    ("x1^(x2 - 1) = 0", UnsupportedConstruct),
    ("x1^-2 = 1", UnsupportedConstruct),
    ("y + x1 = 0", UnknownVariable),
    ("x0 = 1", UnknownVariable),
    ("x1 + x3 = 0", UnknownVariable),
])
def test_rejections(text, cls):
    with pytest.raises(cls):
        parse_equation(text)


def test_binomial_expansion():
    p = expand_polynomial(parse_equation("(x1+x2)^2 = 0"))
    assert p == poly({(2, 0): 1, (1, 1): 2, (0, 2): 1}, 2)
    assert p.degree == 2


def test_semicubical_expansion():
    p = expand_polynomial(parse_equation("x2^3 - x1^2 = 0"))
    assert p == poly({(0, 3): 1, (2, 0): -1}, 2)
    assert p.degree == 3


def test_constant_equation():
    eq = parse_equation("5 = 0")
    assert eq.is_algebraic and eq.degree == 0 and eq.k == 0
    p = expand_polynomial(eq)
    assert p.constant_term == 5 and p.degree == 0


def test_expand_non_algebraic_raises():
    with pytest.raises(NotAlgebraic):
        expand_polynomial(parse_equation("x1^x2 = 8"))


def test_unary_minus_binds_looser_than_power():
    assert evaluate(parse_expression("-x1^2"), (3,)) == -9
    assert evaluate(parse_expression("(-x1)^2"), (3,)) == 9
    assert evaluate(parse_expression("-2^2"), ()) == -4


def test_constant_exponent_expression_is_algebraic():
    eq = parse_equation("x1^(1+2) = 8")
    assert eq.is_algebraic and eq.degree == 3


def test_big_integers_are_exact():
    eq = parse_equation("5^x1 = 2^x2")
    assert evaluate(eq.F, (200, 1)) == 5**200 - 2


def test_system_shares_k():
    a, b = parse_system(["x1 = x2", "x3 = 2"])
    assert a.k == b.k == 3
    with pytest.raises(UnknownVariable):
        parse_equation("x4 = 1", 3)


# 20 algebraically identical rearrangements
REARRANGEMENTS = [
    ("x1^2 + x2^2 = 25", "x2^2 = 25 - x1^2"),
    ("(x1+x2)^2 = 0", "x1*x1 + 2*x1*x2 + x2*x2 = 0"),
    ("x1*x2 = 12", "12 = x2*x1"),
    ("x2 - x1 = 0", "x2 = x1"),
    ("(x1-2)*(x1-5) = 0", "x1^2 - 7*x1 + 10 = 0"),
    ("x1^3 = x2^2", "x1^3 - x2^2 = 0"),
    ("(x1+1)^3 = x2", "x1^3 + 3*x1^2 + 3*x1 + 1 - x2 = 0"),
    ("2*(x1 + x2) = x3", "2*x1 + 2*x2 - x3 = 0"),
    ("x1^2 - x2^2 = 0", "(x1 - x2)*(x1 + x2) = 0"),
    ("-(x1 - x2) = 3", "x2 - x1 - 3 = 0"),
    ("x1*(x2 + x3) = x1*x2", "x1*x3 = 0"),
    ("(x1 - x2)^2 = 1", "x1^2 + x2^2 = 2*x1*x2 + 1"),
    ("x1^2 + x2^2 + x3^2 = 100", "100 - x3^2 = x1^2 + x2^2"),
    ("3*x1 + 5*x2 = 15", "5*x2 = 15 - 3*x1"),
    ("x1^(2+1) = 27", "x1*x1*x1 - 27 = 0"),
    ("(x1 + x2)*(x1 - x2) = x3^2", "x1^2 - x2^2 - x3^2 = 0"),
    ("2*x1^2 + x2^2 = x3^2", "x3^2 - x2^2 - 2*x1^2 = 0"),
    ("-(-x1) = 4", "x1 - 4 = 0"),
    ("x1^0 + x2 = 2", "x2 = 1"),
    ("(2*x1 - 3)^2 = 0", "4*x1^2 - 12*x1 + 9 = 0"),
]


def _oriented(p):
    # F = 0 and -F = 0 are the same equation; fix the sign of the top monomial
    lead = max(p.terms)
    return p if p.terms[lead] > 0 else -p


@pytest.mark.parametrize("left, right", REARRANGEMENTS)
def test_rearrangements_expand_equal(left, right):
    a, b = parse_equation(left, 3), parse_equation(right, 3)
    assert _oriented(expand_polynomial(a)) == _oriented(expand_polynomial(b))


@pytest.mark.parametrize("left, right", REARRANGEMENTS)
def test_round_trip_corpus(left, right):
    for text in (left, right):
        eq = parse_equation(text, 3)
        again = parse_equation(str(eq), 3)
        assert again.F == eq.F


# --- property tests against Python's own integer evaluation ---

def _atoms():
    return st.one_of(
        st.integers(0, 12).map(str),
        st.sampled_from(["x1", "x2", "x3"]),
    )


def _exprs():
    def extend(inner):
        return st.one_of(
            st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
            inner.map(lambda e: f"-{e}"),
            st.tuples(inner, st.one_of(st.integers(0, 3).map(str), st.sampled_from(["x1", "x2"])))
              .map(lambda t: f"({t[0]})^{t[1]}"),
        )
    return st.recursive(_atoms(), extend, max_leaves=8)


def _python_value(text, point):
    src = text.replace("^", "**")
    return eval(src, {"__builtins__": {}}, dict(zip(("x1", "x2", "x3"), point)))


POINTS = list(itertools.product((1, 2, 3), repeat=3))


@settings(max_examples=150, deadline=None)
@given(_exprs())
def test_parse_agrees_with_python(text):
    e = parse_expression(text)
    fn = compile_expr(e, 3)
    for pt in POINTS[::4]:
        expected = _python_value(text, pt)
        assert evaluate(e, pt) == expected
        assert fn(*pt) == expected


@settings(max_examples=150, deadline=None)
@given(_exprs(), _exprs())
def test_round_trip_property(lhs, rhs):
    eq = parse_equation(f"{lhs} = {rhs}", 3)
    again = parse_equation(str(eq), 3)
    assert again.F == eq.F
    assert fold(eq.F) == eq.F
    assert format_expr(parse_expression(format_expr(eq.F))) == format_expr(eq.F)


@settings(max_examples=100, deadline=None)
@given(_exprs())
def test_kind_detection(text):

    def has_variable_exponent(node):
        if isinstance(node, Power):
            return bool(_vars(node.exponent)) or has_variable_exponent(node.base)
        if isinstance(node, Negate):
            return has_variable_exponent(node.operand)
        children = getattr(node, "terms", None) or getattr(node, "factors", None) or ()
        return any(has_variable_exponent(c) for c in children)

    def _vars(node):
        if isinstance(node, Var):
            return {node.index}
        if isinstance(node, Const):
            return set()
        if isinstance(node, Power):
            return _vars(node.base) | _vars(node.exponent)
        if isinstance(node, Negate):
            return _vars(node.operand)
        children = getattr(node, "terms", None) or getattr(node, "factors", None) or ()
        return set().union(*(_vars(c) for c in children)) if children else set()

    eq = parse_equation(f"{text} = 0", 3)
    assert eq.is_algebraic == (not has_variable_exponent(eq.F))


@settings(max_examples=100, deadline=None)
@given(_exprs())
def test_expansion_agrees_with_evaluation(text):
    eq = parse_equation(f"{text} = 0", 3)
    if not eq.is_algebraic:
        return
    p = expand_polynomial(eq).with_k(3)
    for pt in POINTS[::3]:
        assert p.evaluate(pt) == evaluate(eq.F, pt)
