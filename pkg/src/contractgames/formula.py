"""Propositional formulas over a declared vocabulary of Boolean variables.

ASTs are immutable; parsing resolves variable names against an ordered
vocabulary so evaluation can index directly into a valuation bit tuple.

Grammar (tightest binding first): ``~``/``!``, ``&``, ``|``, ``->``
(right-associative), ``<->`` (left-associative). Constants are spelled
``T``/``true`` and ``F``/``false``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class FormulaError(ValueError):
    """Base class for formula construction problems."""


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UndeclaredVariableError(FormulaError):
    def __init__(self, name: str, position: int) -> None:
        super().__init__(f"undeclared variable '{name}' (at position {position})")
        self.name = name
        self.position = position


class Formula:
    """Marker base class for AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Var(Formula):
    index: int
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


TOP = Const(True)
BOTTOM = Const(False)


def evaluate(formula: Formula, valuation: Sequence[int]) -> bool:
    """Evaluate under a total assignment (position j = variable j)."""
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, Var):
        return bool(valuation[formula.index])
    if isinstance(formula, Not):
        return not evaluate(formula.operand, valuation)
    if isinstance(formula, And):
        return evaluate(formula.left, valuation) and evaluate(formula.right, valuation)
    if isinstance(formula, Or):
        return evaluate(formula.left, valuation) or evaluate(formula.right, valuation)
    if isinstance(formula, Implies):
        return (not evaluate(formula.left, valuation)) or evaluate(formula.right, valuation)
    if isinstance(formula, Iff):
        return evaluate(formula.left, valuation) == evaluate(formula.right, valuation)
    raise TypeError(f"not a formula node: {formula!r}")


def variables_of(formula: Formula) -> frozenset[int]:
    """Indices of all variables occurring in the formula."""
    if isinstance(formula, Const):
        return frozenset()
    if isinstance(formula, Var):
        return frozenset((formula.index,))
    if isinstance(formula, Not):
        return variables_of(formula.operand)
    if isinstance(formula, (And, Or, Implies, Iff)):
        return variables_of(formula.left) | variables_of(formula.right)
    raise TypeError(f"not a formula node: {formula!r}")


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<iff><->)|(?P<implies>->)|(?P<and>&)|(?P<or>\|)"
    r"|(?P<not>[~!])|(?P<lparen>\()|(?P<rparen>\))"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)

_CONSTANTS = {"T": True, "true": True, "F": False, "false": False}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == match.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise FormulaSyntaxError(f"unexpected character {stripped[0]!r}", bad_at)
        kind = match.lastgroup
        assert kind is not None
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, vocabulary: Sequence[str]) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.index_of = {name: j for j, name in enumerate(vocabulary)}

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self, kind: str) -> tuple[str, str, int]:
        token = self.tokens[self.pos]
        if token[0] != kind:
            raise FormulaSyntaxError(f"expected {kind}, found {token[1]!r}", token[2])
        self.pos += 1
        return token

    def parse(self) -> Formula:
        node = self.iff()
        kind, value, position = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected token {value!r}", position)
        return node

    def iff(self) -> Formula:
        node = self.implies()
        while self.peek()[0] == "iff":
            self.take("iff")
            node = Iff(node, self.implies())
        return node

    def implies(self) -> Formula:
        node = self.disjunction()
        if self.peek()[0] == "implies":
            self.take("implies")
            return Implies(node, self.implies())
        return node

    def disjunction(self) -> Formula:
        node = self.conjunction()
        while self.peek()[0] == "or":
            self.take("or")
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Formula:
        node = self.unary()
        while self.peek()[0] == "and":
            self.take("and")
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        kind, _, _ = self.peek()
        if kind == "not":
            self.take("not")
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, position = self.peek()
        if kind == "lparen":
            self.take("lparen")
            node = self.iff()
            self.take("rparen")
            return node
        if kind == "ident":
            self.take("ident")
            if value in _CONSTANTS:
                return Const(_CONSTANTS[value])
            index = self.index_of.get(value)
            if index is None:
                raise UndeclaredVariableError(value, position)
            return Var(index, value)
        raise FormulaSyntaxError(f"expected a formula, found {value!r}", position)


def parse_formula(text: str, vocabulary: Sequence[str]) -> Formula:
    """Parse against an ordered vocabulary; names resolve to positions."""
    return _Parser(text, vocabulary).parse()


# Precedence levels used by the printer; a child is parenthesized when its
# level is below the minimum its position admits.
_LEVEL_IFF = 1
_LEVEL_IMPLIES = 2
_LEVEL_OR = 3
_LEVEL_AND = 4
_LEVEL_NOT = 5
_LEVEL_ATOM = 6


def _print(formula: Formula, min_level: int) -> str:
    if isinstance(formula, Const):
        return "T" if formula.value else "F"
    if isinstance(formula, Var):
        return formula.name
    if isinstance(formula, Not):
        text, level = "~" + _print(formula.operand, _LEVEL_NOT), _LEVEL_NOT
    elif isinstance(formula, And):
        text = _print(formula.left, _LEVEL_AND) + " & " + _print(formula.right, _LEVEL_AND + 1)
        level = _LEVEL_AND
    elif isinstance(formula, Or):
        text = _print(formula.left, _LEVEL_OR) + " | " + _print(formula.right, _LEVEL_OR + 1)
        level = _LEVEL_OR
    elif isinstance(formula, Implies):
        text = _print(formula.left, _LEVEL_IMPLIES + 1) + " -> " + _print(formula.right, _LEVEL_IMPLIES)
        level = _LEVEL_IMPLIES
    elif isinstance(formula, Iff):
        text = _print(formula.left, _LEVEL_IFF) + " <-> " + _print(formula.right, _LEVEL_IFF + 1)
        level = _LEVEL_IFF
    else:
        raise TypeError(f"not a formula node: {formula!r}")
    if level < min_level:
        return "(" + text + ")"
    return text


def print_formula(formula: Formula) -> str:
    """Minimally parenthesized text; re-parsing yields an identical AST."""
    return _print(formula, _LEVEL_IFF)
