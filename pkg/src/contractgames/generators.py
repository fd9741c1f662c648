"""Seeded random games, contracts, and formulas for corpus-style testing.

Everything is driven by a caller-supplied ``random.Random`` so corpora are
reproducible from a single seed.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from .contracts import Contract, build_contract
from .formula import And, Const, Formula, Iff, Implies, Not, Or, Var
from .game import BooleanGame, build_game


def random_formula(rng: random.Random, variables: Sequence[str], depth: int = 3) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.12:
            return Const(rng.random() < 0.5)
        index = rng.randrange(len(variables))
        return Var(index, variables[index])
    shape = rng.choice(("not", "and", "or", "implies", "iff"))
    if shape == "not":
        return Not(random_formula(rng, variables, depth - 1))
    left = random_formula(rng, variables, depth - 1)
    right = random_formula(rng, variables, depth - 1)
    return {"and": And, "or": Or, "implies": Implies, "iff": Iff}[shape](left, right)


def random_game(
    rng: random.Random,
    max_vars: int = 4,
    max_agents: int = 3,
    max_cost: int = 3,
    max_observable: int | None = None,
    denominators: Sequence[int] = (1,),
) -> BooleanGame:
    """Random game: random control partition, goals, sparse costs, and a
    random observable subset (optionally size-capped)."""
    n_vars = rng.randint(1, max_vars)
    n_agents = rng.randint(1, min(max_agents, n_vars))
    names = tuple(f"p{j + 1}" for j in range(n_vars))

    indices = list(range(n_vars))
    rng.shuffle(indices)
    control: list[list[int]] = [[indices[i]] for i in range(n_agents)]
    for j in indices[n_agents:]:
        control[rng.randrange(n_agents)].append(j)

    goals = [random_formula(rng, names, depth=rng.randint(0, 3)) for _ in range(n_agents)]

    overrides = []
    for _ in range(n_agents):
        table = {}
        for valuation in _all_bits(n_vars):
            if rng.random() < 0.5:
                table[valuation] = Fraction(rng.randint(0, max_cost), rng.choice(list(denominators)))
        overrides.append(table)
    defaults = [Fraction(rng.randint(0, max_cost), rng.choice(list(denominators))) for _ in range(n_agents)]

    observable = [j for j in range(n_vars) if rng.random() < 0.5]
    if max_observable is not None and len(observable) > max_observable:
        observable = sorted(rng.sample(observable, max_observable))

    return build_game(
        variables=names,
        control=control,
        goals=goals,
        observable=observable,
        defaults=defaults,
        overrides=overrides,
    )


def random_contract(rng: random.Random, game: BooleanGame, max_payment: int = 12) -> Contract:
    overrides = []
    for _ in range(game.n_agents):
        table = {}
        for observation in game.observations():
            if rng.random() < 0.6:
                table[observation] = Fraction(rng.randint(0, max_payment))
        overrides.append(table)
    defaults = [Fraction(rng.randint(0, max_payment)) if rng.random() < 0.3 else Fraction(0) for _ in range(game.n_agents)]
    return build_contract(game, defaults=defaults, overrides=overrides)


def _all_bits(width: int):
    return itertools.product((0, 1), repeat=width)
