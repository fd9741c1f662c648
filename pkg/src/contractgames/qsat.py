"""Three-block quantified Boolean satisfiability: a brute-force decider, a
translation into a contract-design question, and the agreement check between
the two routes.

An instance asks whether there is an assignment to the first block such that
for every assignment to the second block some assignment to the third block
satisfies the matrix. The translation builds a three-agent game over the
instance variables plus two fresh tie-breaker variables ``__p`` and ``__q``:
agent 1 owns the first block (fully observable), agent 2 owns the second
block and ``__p``, agent 3 owns the third block and ``__q``. Agent 2 wants
the matrix false or the tie-breakers aligned, agent 3 wants the matrix true
or the tie-breakers split, and only agent 3 pays a unit cost when the matrix
fails. The instance is a yes exactly when some contract makes the matrix
hold on every equilibrium of the induced game.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .formula import And, Const, Formula, Iff, Not, Or, Var, evaluate, variables_of
from .game import BooleanGame, CostTable, Valuation
from .synthesis import DEFAULT_MAX_SYSTEMS, decide_a_contractibility

RESERVED_P = "__p"
RESERVED_Q = "__q"

BRUTE_FORCE_CAP = 20


@dataclass(frozen=True)
class Qsat3Instance:
    variables: tuple[str, ...]
    exists_first: tuple[str, ...]
    forall: tuple[str, ...]
    exists_second: tuple[str, ...]
    matrix: Formula

    def __post_init__(self) -> None:
        blocks = (self.exists_first, self.forall, self.exists_second)
        flattened = [name for block in blocks for name in block]
        if any(not block for block in blocks):
            raise ValueError("every quantifier block needs at least one variable")
        if sorted(flattened) != sorted(self.variables) or len(set(flattened)) != len(flattened):
            raise ValueError("quantifier blocks must partition the variables")
        if RESERVED_P in self.variables or RESERVED_Q in self.variables:
            raise ValueError(f"{RESERVED_P} and {RESERVED_Q} are reserved names")
        unknown = [j for j in variables_of(self.matrix) if j >= len(self.variables)]
        if unknown:
            raise ValueError("matrix mentions undeclared variables")


def brute_force_qsat3(instance: Qsat3Instance, cap: int = BRUTE_FORCE_CAP) -> bool:
    """Triple-nested enumeration of the quantifier prefix."""
    if len(instance.variables) > cap:
        raise ValueError(f"{len(instance.variables)} variables exceeds the cap of {cap}")
    index_of = {name: j for j, name in enumerate(instance.variables)}
    first = [index_of[name] for name in instance.exists_first]
    middle = [index_of[name] for name in instance.forall]
    last = [index_of[name] for name in instance.exists_second]

    def holds(bits_first, bits_middle, bits_last) -> bool:
        valuation = [0] * len(instance.variables)
        for positions, bits in ((first, bits_first), (middle, bits_middle), (last, bits_last)):
            for j, bit in zip(positions, bits):
                valuation[j] = bit
        return evaluate(instance.matrix, valuation)

    for bits_first in itertools.product((0, 1), repeat=len(first)):
        if all(
            any(
                holds(bits_first, bits_middle, bits_last)
                for bits_last in itertools.product((0, 1), repeat=len(last))
            )
            for bits_middle in itertools.product((0, 1), repeat=len(middle))
        ):
            return True
    return False


def reduce_qsat3(instance: Qsat3Instance) -> tuple[BooleanGame, Formula]:
    """Build the three-agent game and the principal objective (the matrix)."""
    variables = instance.variables + (RESERVED_P, RESERVED_Q)
    index_of = {name: j for j, name in enumerate(variables)}
    p = Var(index_of[RESERVED_P], RESERVED_P)
    q = Var(index_of[RESERVED_Q], RESERVED_Q)
    matrix = instance.matrix  # indices carry over: instance variables come first

    control = (
        tuple(index_of[name] for name in instance.exists_first),
        tuple(sorted(index_of[name] for name in instance.forall + (RESERVED_P,))),
        tuple(sorted(index_of[name] for name in instance.exists_second + (RESERVED_Q,))),
    )
    goals = (
        Const(True),
        Or(Not(matrix), Iff(p, q)),
        Or(matrix, Not(Iff(p, q))),
    )
    payer_overrides: dict[Valuation, Fraction] = {}
    for valuation in itertools.product((0, 1), repeat=len(variables)):
        if not evaluate(matrix, valuation):
            payer_overrides[valuation] = Fraction(1)
    costs = CostTable(
        defaults=(Fraction(0), Fraction(0), Fraction(0)),
        overrides=({}, {}, payer_overrides),
    )
    game = BooleanGame(
        variables=variables,
        control=control,
        goals=goals,
        costs=costs,
        observable=tuple(sorted(index_of[name] for name in instance.exists_first)),
    )
    return game, matrix


def cross_check(instance: Qsat3Instance, max_systems: int = DEFAULT_MAX_SYSTEMS) -> bool:
    """Do the direct decider and the contract-design route agree?"""
    direct = brute_force_qsat3(instance)
    game, objective = reduce_qsat3(instance)
    via_contracts = decide_a_contractibility(game, objective, max_systems=max_systems).answer
    return direct == via_contracts


# ---------------------------------------------------------------------------
# Seeded random instances


def random_matrix(rng: random.Random, variables: Sequence[str], depth: int = 3) -> Formula:
    """Random formula from a small fixed grammar (three binary connectives,
    negation, variables, constants)."""
    if depth <= 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.08:
            return Const(rng.random() < 0.5)
        index = rng.randrange(len(variables))
        return Var(index, variables[index])
    shape = rng.choice(("not", "and", "or", "implies"))
    if shape == "not":
        return Not(random_matrix(rng, variables, depth - 1))
    left = random_matrix(rng, variables, depth - 1)
    right = random_matrix(rng, variables, depth - 1)
    if shape == "and":
        return And(left, right)
    if shape == "or":
        return Or(left, right)
    return Or(Not(left), right)


def random_instance(rng: random.Random, max_vars: int = 6) -> Qsat3Instance:
    """Seeded random instance with nonempty blocks and |variables| <= max_vars."""
    total = rng.randint(3, max(3, max_vars))
    names = tuple(f"x{j + 1}" for j in range(total))
    first_cut = rng.randint(1, total - 2)
    second_cut = rng.randint(first_cut + 1, total - 1)
    return Qsat3Instance(
        variables=names,
        exists_first=names[:first_cut],
        forall=names[first_cut:second_cut],
        exists_second=names[second_cut:],
        matrix=random_matrix(rng, names, depth=3),
    )
