"""Profile enumeration, beneficial deviations, Nash equilibria, and the two
verifiability deciders.

Everything here works on any object exposing the ``BooleanGame`` query
surface (``utility``, ``profiles``, ``unilateral_alternatives``, ...), so the
contract-induced game view plugs in unchanged. Result sets come back as lists
sorted in canonical valuation order.
"""

from __future__ import annotations

from typing import Optional

from .formula import Formula, evaluate
from .game import Observation, Valuation


def beneficial_deviation(game, valuation: Valuation) -> Optional[tuple[int, Valuation]]:
    """First strictly improving unilateral move, or None.

    Search order is agent-ascending, then the deviating agent's strategy bits
    in lexicographic order, so the result is deterministic.
    """
    for agent in range(game.n_agents):
        current = game.utility(agent, valuation)
        for alternative in game.unilateral_alternatives(valuation, agent):
            if game.utility(agent, alternative) > current:
                return agent, alternative
    return None


def is_nash_equilibrium(game, valuation: Valuation) -> bool:
    return beneficial_deviation(game, valuation) is None


def nash_equilibria(game) -> list[Valuation]:
    return [v for v in game.profiles() if is_nash_equilibrium(game, v)]


def ne_satisfying(game, objective: Formula) -> list[Valuation]:
    return [v for v in nash_equilibria(game) if evaluate(objective, v)]


def initial_equilibria(game) -> list[Valuation]:
    """Nash equilibria of the costless version of the game."""
    return nash_equilibria(game.costless())


def consistent_equilibria(game, observation: Observation) -> list[Valuation]:
    return [v for v in nash_equilibria(game) if game.consistent(v, observation)]


def env(game, observation: Observation, objective: Formula) -> list[Valuation]:
    """Equilibria that satisfy the objective and match the observation."""
    return [v for v in consistent_equilibria(game, observation) if evaluate(objective, v)]


def decide_e_verifiability(
    game, observation: Observation, objective: Formula
) -> tuple[bool, Optional[Valuation]]:
    """Does some equilibrium consistent with the observation satisfy the
    objective? Returns the smallest witness on yes."""
    witnesses = env(game, observation, objective)
    if witnesses:
        return True, witnesses[0]
    return False, None


def decide_a_verifiability(
    game, observation: Observation, objective: Formula
) -> tuple[bool, Optional[Valuation]]:
    """Does every equilibrium consistent with the observation satisfy the
    objective? Vacuously yes when none is consistent; returns the smallest
    counterexample on no."""
    for v in consistent_equilibria(game, observation):
        if not evaluate(objective, v):
            return False, v
    return True, None
