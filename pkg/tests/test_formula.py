import itertools

import pytest
from hypothesis import given, settings

from contractgames.formula import (
    And,
    Const,
    Formula,
    FormulaSyntaxError,
    Iff,
    Implies,
    Not,
    Or,
    UndeclaredVariableError,
    Var,
    evaluate,
    parse_formula,
    print_formula,
    variables_of,
)

from .strategies import formulas

VOCAB = ("p1", "p2", "p3")


def test_parse_negation():
    assert parse_formula("~p1", ("p1", "p2")) == Not(Var(0, "p1"))


def test_parse_constant():
    assert parse_formula("T", VOCAB) == Const(True)
    assert parse_formula("true", VOCAB) == Const(True)
    assert parse_formula("F", VOCAB) == Const(False)
    assert parse_formula("false", VOCAB) == Const(False)


def test_parse_implication_with_parens():
    got = parse_formula("p3 -> (p1 & p2)", VOCAB)
    assert got == Implies(Var(2, "p3"), And(Var(0, "p1"), Var(1, "p2")))


def test_precedence_layers():
    got = parse_formula("~p1 & p2 | p3 -> p1 <-> p2", VOCAB)
    expected = Iff(
        Implies(Or(And(Not(Var(0, "p1")), Var(1, "p2")), Var(2, "p3")), Var(0, "p1")),
        Var(1, "p2"),
    )
    assert got == expected


def test_implies_right_associative():
    got = parse_formula("p1 -> p2 -> p3", VOCAB)
    assert got == Implies(Var(0, "p1"), Implies(Var(1, "p2"), Var(2, "p3")))


def test_iff_left_associative():
    got = parse_formula("p1 <-> p2 <-> p3", VOCAB)
    assert got == Iff(Iff(Var(0, "p1"), Var(1, "p2")), Var(2, "p3"))


def test_bang_is_negation():
    assert parse_formula("!p1", VOCAB) == parse_formula("~p1", VOCAB)


def test_syntax_error_carries_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("p1 & ", VOCAB)
    assert err.value.position == 5
    with pytest.raises(FormulaSyntaxError):
        parse_formula("(p1 | p2", VOCAB)
    with pytest.raises(FormulaSyntaxError):
        parse_formula("p1 p2", VOCAB)
    with pytest.raises(FormulaSyntaxError):
        parse_formula("p1 @ p2", VOCAB)


def test_undeclared_variable_named():
    with pytest.raises(UndeclaredVariableError) as err:
        parse_formula("p1 & q7", VOCAB)
    assert err.value.name == "q7"


def test_eval_examples():
    assert evaluate(parse_formula("~p1", ("p1", "p2")), (0, 1)) is True
    assert evaluate(parse_formula("p3 -> (p1 & p2)", VOCAB), (1, 1, 1)) is True
    assert evaluate(parse_formula("p1 & p2 & p3", VOCAB), (1, 1, 0)) is False


def test_print_examples():
    assert print_formula(Not(Var(0, "p1"))) == "~p1"
    assert print_formula(Const(True)) == "T"
    assert print_formula(And(Var(0, "p1"), Or(Var(1, "p2"), Var(2, "p3")))) == "p1 & (p2 | p3)"


def test_variables_of():
    f = parse_formula("p1 & (p3 | ~p1)", VOCAB)
    assert variables_of(f) == frozenset({0, 2})
    assert variables_of(Const(False)) == frozenset()


@given(formulas(VOCAB))
def test_roundtrip(f: Formula):
    assert parse_formula(print_formula(f), VOCAB) == f


def _reference_eval(f: Formula, valuation) -> bool:
    """Independent route: translate to a Python expression and eval it."""
    def translate(node) -> str:
        if isinstance(node, Const):
            return "True" if node.value else "False"
        if isinstance(node, Var):
            return f"bool(v[{node.index}])"
        if isinstance(node, Not):
            return f"(not {translate(node.operand)})"
        if isinstance(node, And):
            return f"({translate(node.left)} and {translate(node.right)})"
        if isinstance(node, Or):
            return f"({translate(node.left)} or {translate(node.right)})"
        if isinstance(node, Implies):
            return f"((not {translate(node.left)}) or {translate(node.right)})"
        if isinstance(node, Iff):
            return f"({translate(node.left)} == {translate(node.right)})"
        raise TypeError(node)

    return eval(translate(f), {"v": valuation})  # noqa: S307 - test oracle


@settings(max_examples=150)
@given(formulas(tuple(f"x{i}" for i in range(6)), max_leaves=16))
def test_truth_table_against_reference(f: Formula):
    for valuation in itertools.product((0, 1), repeat=6):
        assert evaluate(f, valuation) == _reference_eval(f, valuation)
