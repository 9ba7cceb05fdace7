"""Parser and evaluator tests for the expression language."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpcheck.errors import JetDomainError
from warpcheck.expr import (BinOp, Call, Neg, Num, Param, ParseError, Var,
                            eval_expr, eval_value, parse, pretty, shift_vars)

# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_basic_ast_shape():
    e = parse("x1 + 2*x2", dim=2)
    assert e == BinOp("+", Var(0), BinOp("*", Num(2.0), Var(1)))


def test_function_composition():
    e = parse("sin(x1)*exp(x2)", dim=2)
    assert e == BinOp("*", Call("sin", Var(0)), Call("exp", Var(1)))


def test_truncated_input_reports_offset():
    with pytest.raises(ParseError) as ei:
        parse("x1 +", dim=2)
    assert ei.value.offset == 4
    assert "atom" in ei.value.expected
    assert ei.value.found == "end of input"


def test_unknown_identifier():
    with pytest.raises(ParseError) as ei:
        parse("x1 + foo", dim=2)
    assert ei.value.offset == 5


def test_variable_index_out_of_range():
    with pytest.raises(ParseError):
        parse("x3", dim=2)
    with pytest.raises(ParseError):
        parse("x0", dim=2)
    with pytest.raises(ParseError):
        parse("p1", dim=2, n_params=0)


def test_unbalanced_parentheses():
    with pytest.raises(ParseError) as ei:
        parse("(x1 + 2", dim=1)
    assert ei.value.expected == "')'"


def test_no_implicit_multiplication():
    with pytest.raises(ParseError):
        parse("2x1", dim=1)


def test_malformed_number():
    with pytest.raises(ParseError):
        parse("1e+", dim=1)
    with pytest.raises(ParseError):
        parse(". + 1", dim=1)


def test_numbers_with_exponents():
    assert eval_value(parse("1.5e2", dim=1), np.array([0.0])) == 150.0
    assert eval_value(parse("2.5e-1", dim=1), np.array([0.0])) == 0.25
    assert eval_value(parse(".5", dim=1), np.array([0.0])) == 0.5


# ---------------------------------------------------------------------------
# Precedence and binding
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("src,want", [
    ("2+3*4", 14.0),
    ("2^3^2", 512.0),       # right-associative
    ("-2^2", -4.0),         # unary minus applies to the whole power
    ("(-2)^2", 4.0),
    ("2^-3", 0.125),        # signed exponent
    ("6/3/2", 1.0),         # left-associative
    ("1-2-3", -4.0),
    ("-sin(0)", 0.0),
])
def test_precedence(src, want):
    got = eval_value(parse(src, dim=1), np.array([1.0]))
    assert got == pytest.approx(want, abs=1e-15)


# ---------------------------------------------------------------------------
# Evaluation as jets
# ---------------------------------------------------------------------------


def test_square_jet():
    j = eval_expr(parse("x1^2", dim=1), np.array([3.0]))
    npt.assert_allclose([j.value, j.d1[0], j.d2[0, 0]], [9.0, 6.0, 2.0])


def test_parameter_is_constant():
    j = eval_expr(parse("p1", dim=2, n_params=1), np.array([5.0, 7.0]), params=(7.0,))
    assert j.value == 7.0
    assert not j.d1.any() and not j.d2.any() and not j.d3.any()


def test_log_singularity_carries_position():
    e = parse("2 + ln(x1)", dim=1)
    with pytest.raises(JetDomainError) as ei:
        eval_expr(e, np.array([0.0]))
    assert ei.value.op == "ln"
    assert ei.value.pos == 4  # offset of 'ln' in the source


def test_mixed_partials_of_product():
    e = parse("x1*sin(x2) + x2^3", dim=2)
    x = np.array([2.0, 0.7])
    j = eval_expr(e, x)
    assert j.value == pytest.approx(2 * math.sin(0.7) + 0.7**3)
    assert j.d1[0] == pytest.approx(math.sin(0.7))
    assert j.d1[1] == pytest.approx(2 * math.cos(0.7) + 3 * 0.7**2)
    assert j.d2[0, 1] == pytest.approx(math.cos(0.7))
    assert j.d3[1, 1, 1] == pytest.approx(-2 * math.cos(0.7) + 6)


def test_shift_vars():
    e = parse("x1*x2", dim=2)
    s = shift_vars(e, 3)
    assert s == BinOp("*", Var(3), Var(4))


# ---------------------------------------------------------------------------
# Round-trip property
# ---------------------------------------------------------------------------


def _asts(dim=3, n_params=2):
    """Strategy generating parser-shaped ASTs (non-negative literals only,
    since the lexer never produces a negative number token)."""
    leaves = st.one_of(
        st.floats(min_value=0.0, max_value=1e6, allow_nan=False,
                  allow_infinity=False).map(Num),
        st.integers(0, dim - 1).map(Var),
        st.integers(0, n_params - 1).map(Param),
    )

    def extend(children):
        return st.one_of(
            children.map(Neg),
            st.tuples(st.sampled_from("+-*/^"), children, children)
              .map(lambda t: BinOp(*t)),
            st.tuples(st.sampled_from(["sin", "cos", "exp", "ln", "sqrt"]), children)
              .map(lambda t: Call(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@given(_asts())
@settings(max_examples=200, deadline=None)
def test_pretty_print_round_trip(ast):
    src = pretty(ast)
    reparsed = parse(src, dim=3, n_params=2)
    assert reparsed == ast


@given(st.text(max_size=30))
@settings(max_examples=300, deadline=None)
def test_parse_is_total(junk):
    """Arbitrary input either parses or raises ParseError, nothing else."""
    try:
        parse(junk, dim=2, n_params=1)
    except ParseError as err:
        assert 0 <= err.offset <= len(junk)
