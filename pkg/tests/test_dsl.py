from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kova.dsl import (BinOp, Neg, Num, Pow, Var, format_expr, format_system, format_tensor,
                      parse_system, parse_tensor, to_vector_field)
from kova.errors import ParseError
from kova.polyalg import Polynomial

from conftest import SYSTEMS, tensors

NAMES = ("x", "y")


def exprs():
    leaf = st.one_of(st.integers(0, 9).map(Num), st.sampled_from(NAMES).map(Var))
    return st.recursive(leaf, lambda sub: st.one_of(
        sub.map(Neg),
        st.tuples(st.sampled_from("+-*"), sub, sub).map(lambda t: BinOp(t[0], t[1], t[2])),
        st.tuples(sub, st.integers(0, 3)).map(lambda t: Pow(t[0], t[1]))), max_leaves=8)


def field_of(text, float_mode=False):
    return to_vector_field(parse_system(text, float_mode))


@given(exprs(), exprs())
def test_expression_round_trip(a, b):
    text = f"x' = {format_expr(a)}\ny' = {format_expr(b)}\n"
    spec = parse_system(text)
    again = parse_system(format_system(spec))
    assert to_vector_field(again) == to_vector_field(spec)


@pytest.mark.parametrize("name,float_mode", [("lotka.kova", False), ("oregonator.kova", False),
                                             ("artificial.kova", True)])
def test_system_files_round_trip(name, float_mode):
    spec = parse_system((SYSTEMS / name).read_text(), float_mode)
    again = parse_system(format_system(spec), float_mode)
    assert to_vector_field(again) == to_vector_field(spec)
    assert again.weights == spec.weights and again.degree == spec.degree


@given(tensors(n=2, p=1, q=1))
def test_tensor_round_trip(T):
    spec = parse_system("x' = x\ny' = y\n")
    if T.is_zero():
        return
    assert parse_tensor(format_tensor(T, NAMES), spec) == T


alphabet = st.sampled_from(list("xyz'=+-*/^()[]{},.0123456789 \nd@#ab") + ["params", "weights"])


@settings(max_examples=100)
@given(st.lists(alphabet, max_size=30).map("".join))
def test_fuzzed_inputs_fail_cleanly(text):
    try:
        parse_system(text)
    except ParseError as e:
        assert e.kind in {"lexical", "syntax", "undeclared-identifier", "duplicate-equation", "non-polynomial"}
        assert e.line is not None and e.line >= 1


@pytest.mark.parametrize("text,kind,col", [
    ("x' = x/y\ny' = y\n", "non-polynomial", 7),
    ("x' = z\n", "undeclared-identifier", 6),
    ("x' = (x\n", "syntax", None),
    ("x' = x\nx' = 1\n", "duplicate-equation", 1),
    ("x' = 1.5*x\n", "lexical", 6),
])
def test_error_kinds(text, kind, col):
    with pytest.raises(ParseError) as info:
        parse_system(text)
    assert info.value.kind == kind
    if col is not None:
        assert info.value.column == col


def test_parameters_and_division_by_constant():
    F = field_of("params { a = 2, b = a/4 }\nx' = a*x/3 + b\n")
    assert F[0] == Polynomial(1, {(1,): Fraction(2, 3), (0,): Fraction(1, 2)})


def test_float_mode_decimals():
    F = field_of("x' = 1.5*x\n", float_mode=True)
    assert not F.exact and F[0].coefficient((1,)) == 1.5


def test_precedence():
    F = field_of("x' = -x^2\ny' = 2*x - y*3 + 1\n")
    x = Polynomial.variable(2, 0)
    assert F[0] == -(x * x)


def test_tensor_syntax():
    spec = parse_system("x' = x\ny' = y\n")
    T = parse_tensor("T = x d/dx @ dy - 2 d/dy ⊗ dy", spec)
    assert (T.p, T.q) == (1, 1)
    assert T[(1, 1)] == Polynomial.constant(2, -2)
    with pytest.raises(ParseError):
        parse_tensor("T = dx @ d/dy", spec)
    with pytest.raises(ParseError):
        parse_tensor("T = d/dx + dy", spec)
