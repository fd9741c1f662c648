"""Contract synthesis: induce an equilibrium, eliminate a set of initial
equilibria, and decide whether some contract makes the principal's objective
hold on some / on every equilibrium of the induced game.

Every "yes" answer ships a concrete contract that has already survived an
exhaustive re-computation of the induced game's equilibria; a verification
mismatch is an internal bug and raises instead of degrading silently.

The deciders lean on one observation about contract-modified utilities: once
the goal statuses of two profiles are fixed, their comparison is linear in
the deviating agent's payments, and the loser-side maximum-payment offset
cancels whenever the statuses are equal. Unilateral moves therefore split
into three classes:

* free: strictly beneficial under every contract (loser-to-winner upgrades,
  and observation-equivalent moves to a strictly cheaper profile of equal
  status);
* dead: beneficial under no contract (winner-to-loser moves, and
  observation-equivalent equal-status moves that are not strictly cheaper);
* linear: distinguishable equal-status moves, beneficial exactly when the
  payment difference between the two observations exceeds the cost
  difference.

Eliminating a profile means choosing one non-dead move out of it; making a
profile stable means blocking all non-dead moves out of it. Both reduce to
exact linear feasibility over payment variables keyed by (agent,
observation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .contracts import Contract, build_contract, induced_game, null_contract
from .deviations import (
    is_inducible_deviation,
    is_inducible_equilibrium,
    projection_is_acyclic,
    projection_longest_paths,
)
from .equilibria import initial_equilibria, nash_equilibria
from .feasibility import (
    LinearConstraint,
    difference,
    difference_system_feasible,
    fm_feasible,
    lower_bound,
)
from .formula import Formula, evaluate
from .game import BooleanGame, Observation, Valuation

PaymentKey = tuple[int, Observation]


class CertificateError(RuntimeError):
    """A synthesized contract failed its own brute-force re-check."""


class SearchCapExceeded(RuntimeError):
    def __init__(self, cap: int) -> None:
        super().__init__(f"search cap of {cap} feasibility systems exceeded")
        self.cap = cap


DEFAULT_MAX_SYSTEMS = 10**6


@dataclass(frozen=True)
class SynthesisCertificate:
    answer: bool
    contract: Optional[Contract]
    witness_profile: Optional[Valuation]
    eliminated: tuple[Valuation, ...]
    verified: bool


# ---------------------------------------------------------------------------
# Move classification

FREE = "free"
DEAD = "dead"
LINEAR = "linear"


@dataclass(frozen=True)
class ClassifiedMove:
    source: Valuation
    target: Valuation
    agent: int
    kind: str
    constraint: Optional[LinearConstraint]  # strict, present iff kind == LINEAR


def classify_move(game: BooleanGame, v: Valuation, w: Valuation, agent: int) -> ClassifiedMove:
    wins_v = game.wins(agent, v)
    wins_w = game.wins(agent, w)
    if wins_v and not wins_w:
        return ClassifiedMove(v, w, agent, DEAD, None)
    if not wins_v and wins_w:
        return ClassifiedMove(v, w, agent, FREE, None)
    if game.indistinguishable(v, w):
        if game.cost(agent, w) < game.cost(agent, v):
            return ClassifiedMove(v, w, agent, FREE, None)
        return ClassifiedMove(v, w, agent, DEAD, None)
    gap = game.cost(agent, w) - game.cost(agent, v)
    constraint = difference(
        (agent, game.observation(w)), (agent, game.observation(v)), gap, strict=True
    )
    return ClassifiedMove(v, w, agent, LINEAR, constraint)


def _contract_from_assignment(game: BooleanGame, assignment: dict) -> Contract:
    overrides: list[dict[Observation, Fraction]] = [{} for _ in range(game.n_agents)]
    for (agent, observation), value in assignment.items():
        if value != 0:
            overrides[agent][observation] = value
    return build_contract(game, overrides=overrides)


# ---------------------------------------------------------------------------
# Inducing a single equilibrium


def induce_contract(game: BooleanGame, profile: Valuation) -> Optional[Contract]:
    """Contract making the profile an equilibrium, or None when impossible.

    Pays every agent its maximal cost plus one on the profile's observation
    and nothing elsewhere, then re-checks stability exhaustively.
    """
    if not is_inducible_equilibrium(game, profile):
        return None
    target = game.observation(profile)
    contract = build_contract(
        game,
        overrides=[{target: game.c_star[agent] + 1} for agent in range(game.n_agents)],
    )
    stable = profile in set(nash_equilibria(induced_game(game, contract)))
    if not stable:
        raise CertificateError(
            "profile classified inducible but the induction contract failed verification"
        )
    return contract


# ---------------------------------------------------------------------------
# Eliminating a set of initial equilibria


def _ladder_contract(game: BooleanGame, linear_moves: Sequence[ClassifiedMove]) -> Contract:
    """Payment ladder along the chosen moves' observation projections.

    Each agent's projection must be acyclic. Observations further from the
    end of the agent's longest observed chain pay less, in steps of the
    agent's maximal cost plus one, so every chosen move strictly gains at
    least that step. Pays only at observations with an incoming chosen move.
    """
    overrides: list[dict[Observation, Fraction]] = [{} for _ in range(game.n_agents)]
    agents = sorted({move.agent for move in linear_moves})
    for agent in agents:
        projected: dict[Observation, dict[Observation, tuple]] = {}
        incoming: set[Observation] = set()
        for move in linear_moves:
            if move.agent != agent:
                continue
            o_src = game.observation(move.source)
            o_tgt = game.observation(move.target)
            projected.setdefault(o_src, {})[o_tgt] = (move.source, move.target)
            incoming.add(o_tgt)
        depths = projection_longest_paths(projected)
        longest = max(depths.values(), default=0)
        step = game.c_star[agent] + 1
        for observation in incoming:
            overrides[agent][observation] = (longest - depths.get(observation, 0)) * step
    contract = build_contract(game, overrides=overrides)
    for move in linear_moves:
        gain = contract.payment(move.agent, game.observation(move.target)) - contract.payment(
            move.agent, game.observation(move.source)
        )
        if gain < game.c_star[move.agent] + 1:
            raise CertificateError("payment ladder violates its step invariant")
    return contract


def _outgoing_inducible_moves(game: BooleanGame, profile: Valuation) -> list[ClassifiedMove]:
    moves = []
    for agent in range(game.n_agents):
        for w in game.unilateral_alternatives(profile, agent):
            if is_inducible_deviation(game, profile, w, agent):
                moves.append(classify_move(game, profile, w, agent))
    return moves


def _nonneg(constraints: Sequence[LinearConstraint]) -> list[LinearConstraint]:
    keys = sorted({k for c in constraints for k in c.coeffs})
    return list(constraints) + [lower_bound(k) for k in keys]


def _search_elimination(
    game: BooleanGame,
    targets: Sequence[Valuation],
    max_choices: int = DEFAULT_MAX_SYSTEMS,
) -> tuple[Optional[Contract], Optional[tuple[ClassifiedMove, ...]]]:
    """Pick one outgoing inducible move per target and price it.

    Choices are enumerated smallest-first (targets in canonical order, moves
    agent-ascending then strategy-lexicographic). Free moves need no
    payments. When the chosen linear moves project acyclically per agent the
    payment ladder applies directly; otherwise the moves' strict constraints
    go to the exact feasibility core, which may still succeed when the
    projected cycles carry a negative total cost gap.
    """
    init = set(initial_equilibria(game))
    ordered = sorted(set(targets))
    if not ordered:
        raise ValueError("the set of profiles to eliminate is empty")
    outside = [v for v in ordered if v not in init]
    if outside:
        raise ValueError(
            "profiles are not initial equilibria: "
            + "; ".join(str(v) for v in outside)
        )

    per_target = []
    for v in ordered:
        moves = _outgoing_inducible_moves(game, v)
        if not moves:
            return None, None
        per_target.append(moves)

    count = 0
    for choice in itertools.product(*per_target):
        count += 1
        if count > max_choices:
            raise SearchCapExceeded(max_choices)
        linear = [move for move in choice if move.kind == LINEAR]
        acyclic = True
        for agent in sorted({move.agent for move in linear}):
            projected: dict[Observation, dict[Observation, tuple]] = {}
            for move in linear:
                if move.agent == agent:
                    projected.setdefault(game.observation(move.source), {})[
                        game.observation(move.target)
                    ] = ()
            if not projection_is_acyclic(projected):
                acyclic = False
                break
        if acyclic:
            contract = _ladder_contract(game, linear)
        else:
            constraints = _nonneg([move.constraint for move in linear])
            quick = difference_system_feasible(constraints)
            if quick is False:
                continue
            assignment = fm_feasible(constraints)
            if assignment is None:
                continue
            contract = _contract_from_assignment(game, assignment)
        survivors = set(nash_equilibria(induced_game(game, contract))) & set(ordered)
        if survivors:
            raise CertificateError(
                "elimination contract failed verification; survivors: "
                + "; ".join(str(v) for v in sorted(survivors))
            )
        return contract, tuple(choice)
    return None, None


def eliminate_contract(
    game: BooleanGame,
    targets: Sequence[Valuation],
    max_choices: int = DEFAULT_MAX_SYSTEMS,
) -> Optional[Contract]:
    """Contract removing every target from the equilibrium set, or None."""
    contract, _ = _search_elimination(game, targets, max_choices)
    return contract


# ---------------------------------------------------------------------------
# E-Nash contractibility


def decide_e_contractibility(game: BooleanGame, objective: Formula) -> SynthesisCertificate:
    """Is there a contract whose induced game has an equilibrium satisfying
    the objective? Yes exactly when some objective-satisfying profile can be
    made an equilibrium; the certificate carries the inducing contract."""
    for profile in game.profiles():
        if not evaluate(objective, profile):
            continue
        if not is_inducible_equilibrium(game, profile):
            continue
        contract = induce_contract(game, profile)
        assert contract is not None
        equilibria = nash_equilibria(induced_game(game, contract))
        if profile not in set(equilibria) or not evaluate(objective, profile):
            raise CertificateError("induction certificate failed verification")
        return SynthesisCertificate(
            answer=True,
            contract=contract,
            witness_profile=profile,
            eliminated=(),
            verified=True,
        )
    return SynthesisCertificate(False, None, None, (), False)


# ---------------------------------------------------------------------------
# A-Nash contractibility


def _constraint_key(constraint: LinearConstraint):
    return (
        tuple(sorted(constraint.coeffs.items())),
        constraint.constant,
        constraint.strict,
    )


class _Budget:
    def __init__(self, cap: int) -> None:
        self.cap = cap
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.cap:
            raise SearchCapExceeded(self.cap)


def _feasible(constraints: Sequence[LinearConstraint], budget: _Budget) -> bool:
    budget.spend()
    quick = difference_system_feasible(constraints)
    if quick is not None:
        return quick
    return fm_feasible(constraints) is not None


def _solve_disjunctive(
    base: list[LinearConstraint],
    groups: list[tuple[Valuation, tuple[LinearConstraint, ...]]],
    budget: _Budget,
) -> Optional[dict]:
    """Satisfy `base` plus one constraint from every group.

    Depth-first with pruning: at each node every remaining group is filtered
    to the options still feasible against the accumulated system; an emptied
    group cuts the branch. Branches on the smallest filtered group. The fast
    difference-system check prunes; the final accepted system is solved by
    variable elimination for the witness.
    """
    if not _feasible(_nonneg(base), budget):
        return None

    def search(
        chosen: list[LinearConstraint],
        remaining: list[tuple[Valuation, tuple[LinearConstraint, ...]]],
    ) -> Optional[list[LinearConstraint]]:
        if not remaining:
            return chosen
        filtered = []
        for profile, options in remaining:
            alive = tuple(
                opt for opt in options if _feasible(_nonneg(base + chosen + [opt]), budget)
            )
            if not alive:
                return None
            filtered.append((profile, alive))
        pick = min(range(len(filtered)), key=lambda i: len(filtered[i][1]))
        profile, alive = filtered[pick]
        rest = filtered[:pick] + filtered[pick + 1 :]
        for option in alive:
            result = search(chosen + [option], rest)
            if result is not None:
                return result
        return None

    solution = search([], groups)
    if solution is None:
        return None
    assignment = fm_feasible(_nonneg(base + solution))
    if assignment is None:
        raise CertificateError("difference prefilter accepted an infeasible system")
    return assignment


def decide_a_contractibility(
    game: BooleanGame,
    objective: Formula,
    max_systems: int = DEFAULT_MAX_SYSTEMS,
) -> SynthesisCertificate:
    """Is there a contract under which the induced game has equilibria and
    every one of them satisfies the objective?

    Search: pick a candidate equilibrium to stabilize among the inducible
    objective-satisfying profiles, force a beneficial escape from every
    objective-violating profile that could otherwise remain an equilibrium,
    and solve the resulting payment constraints exactly. Profiles outside
    the costless game's equilibria can never survive any contract, so only
    those need escapes.
    """
    budget = _Budget(max_systems)

    base_equilibria = nash_equilibria(game)
    if base_equilibria and all(evaluate(objective, v) for v in base_equilibria):
        contract = null_contract(game)
        verified = set(nash_equilibria(induced_game(game, contract))) == set(base_equilibria)
        if not verified:
            raise CertificateError("null contract changed the equilibrium set")
        return SynthesisCertificate(
            answer=True,
            contract=contract,
            witness_profile=base_equilibria[0],
            eliminated=(),
            verified=True,
        )

    init = initial_equilibria(game)
    candidates = [
        v for v in init if evaluate(objective, v) and is_inducible_equilibrium(game, v)
    ]
    if not candidates:
        return SynthesisCertificate(False, None, None, (), False)

    violators = [v for v in init if not evaluate(objective, v)]
    groups: list[tuple[Valuation, tuple[LinearConstraint, ...]]] = []
    eliminated: list[Valuation] = []
    for v in violators:
        escapes: list[LinearConstraint] = []
        free = False
        for agent in range(game.n_agents):
            for w in game.unilateral_alternatives(v, agent):
                move = classify_move(game, v, w, agent)
                if move.kind == FREE:
                    free = True
                    break
                if move.kind == LINEAR:
                    assert move.constraint is not None
                    escapes.append(move.constraint)
            if free:
                break
        if free:
            continue  # leaves the equilibrium set under every contract
        if not escapes:
            # Stays an equilibrium under every contract while violating the
            # objective; no contract can answer yes.
            return SynthesisCertificate(False, None, None, (), False)
        eliminated.append(v)
        groups.append((v, tuple(escapes)))

    # Identical or superset option sets are redundant: satisfying the
    # smaller disjunction satisfies the larger one.
    keyed = [(profile, options, frozenset(_constraint_key(c) for c in options)) for profile, options in groups]
    pruned: list[tuple[Valuation, tuple[LinearConstraint, ...]]] = []
    for index, (profile, options, keys) in enumerate(keyed):
        redundant = False
        for other_index, (_, _, other_keys) in enumerate(keyed):
            if other_keys < keys or (other_keys == keys and other_index < index):
                redundant = True
                break
        if not redundant:
            pruned.append((profile, options))

    for candidate in candidates:
        stability: list[LinearConstraint] = []
        candidate_obs = game.observation(candidate)
        for agent in range(game.n_agents):
            wins_here = game.wins(agent, candidate)
            for w in game.unilateral_alternatives(candidate, agent):
                if game.wins(agent, w) != wins_here:
                    continue
                if game.indistinguishable(candidate, w):
                    continue  # cost condition already holds: candidate is inducible
                gap = game.cost(agent, candidate) - game.cost(agent, w)
                stability.append(
                    difference((agent, candidate_obs), (agent, game.observation(w)), gap, strict=False)
                )
        assignment = _solve_disjunctive(stability, pruned, budget)
        if assignment is None:
            continue
        contract = _contract_from_assignment(game, assignment)
        induced = induced_game(game, contract)
        surviving = nash_equilibria(induced)
        ok = (
            bool(surviving)
            and all(evaluate(objective, v) for v in surviving)
            and candidate in set(surviving)
        )
        if not ok:
            raise CertificateError("contractibility certificate failed verification")
        return SynthesisCertificate(
            answer=True,
            contract=contract,
            witness_profile=candidate,
            eliminated=tuple(sorted(eliminated)),
            verified=True,
        )
    return SynthesisCertificate(False, None, None, (), False)
