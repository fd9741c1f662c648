"""Deviation taxonomy, equilibrium classification, and deviation graphs.

A unilateral move is *initial* when it never turns the mover from winner to
loser, *inducible* when some payment schedule makes it strictly beneficial,
*soft* when inducible in both directions, and *hard* when inducible one way
only. Inducibility has a purely structural test: either the two profiles are
distinguishable to the principal, or the mover already strictly prefers the
target. These predicates drive the classification of equilibria into
inducible, hard, and soft, and the graph machinery used by elimination.

Observed cycles are detected per agent on the projection of that agent's
edges onto observation space; a projection self-loop (an edge between
observationally equivalent profiles) counts as a cycle of length two.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .equilibria import is_nash_equilibrium, nash_equilibria
from .game import Observation, Valuation, observation_text, valuation_text


class DeviationKind(enum.Enum):
    INITIAL = "initial"
    SOFT = "soft"
    HARD = "hard"


@dataclass(frozen=True)
class DeviationEdge:
    source: Valuation
    target: Valuation
    agent: int
    kind: DeviationKind


def deviating_agent(game, v: Valuation, w: Valuation) -> int:
    """The unique mover between two unilateral variants; raises otherwise."""
    if v == w:
        raise ValueError("profiles are identical, no deviation")
    if len(v) != len(game.variables) or len(w) != len(game.variables):
        raise ValueError("profile width does not match the game")
    changed = {j for j in range(len(v)) if v[j] != w[j]}
    for agent, owned in enumerate(game.control):
        if changed <= set(owned):
            return agent
    raise ValueError("profiles differ on variables of more than one agent")


def is_initial_deviation(game, v: Valuation, w: Valuation, agent: int) -> bool:
    """Winner status survives the move (vacuous for a losing mover)."""
    _check_unilateral(game, v, w, agent)
    return (not game.wins(agent, v)) or game.wins(agent, w)


def is_inducible_deviation(game, v: Valuation, w: Valuation, agent: int) -> bool:
    """Some payment schedule makes the move strictly beneficial.

    Structurally: the move keeps winner status, and either the principal can
    tell the two profiles apart (and may pay the difference), or the mover
    strictly prefers the target already.
    """
    if not is_initial_deviation(game, v, w, agent):
        return False
    if not game.indistinguishable(v, w):
        return True
    return game.utility(agent, w) > game.utility(agent, v)


def is_soft_deviation(game, v: Valuation, w: Valuation, agent: int) -> bool:
    return is_inducible_deviation(game, v, w, agent) and is_inducible_deviation(game, w, v, agent)


def is_hard_deviation(game, v: Valuation, w: Valuation, agent: int) -> bool:
    return is_inducible_deviation(game, v, w, agent) and not is_inducible_deviation(game, w, v, agent)


def _check_unilateral(game, v: Valuation, w: Valuation, agent: int) -> None:
    if len(v) != len(w):
        raise ValueError("profiles have different widths")
    changed = {j for j in range(len(v)) if v[j] != w[j]}
    if not changed:
        raise ValueError("profiles are identical, no deviation")
    if not changed <= set(game.control[agent]):
        raise ValueError(f"profiles differ outside the control of agent {agent + 1}")


def free_under_every_contract(game, v: Valuation, w: Valuation, agent: int) -> bool:
    """True when the move is strictly beneficial under every contract.

    Two shapes qualify: a loser-to-winner upgrade (winners always outrank
    losers), and an observationally equivalent move to a strictly cheaper
    profile of equal goal status (equal pay on both sides).
    """
    if not game.wins(agent, v) and game.wins(agent, w):
        return True
    return game.indistinguishable(v, w) and game.utility(agent, w) > game.utility(agent, v)


# ---------------------------------------------------------------------------
# Equilibrium classification


def is_inducible_equilibrium(game, v: Valuation) -> bool:
    """Can some contract make this profile an equilibrium?

    Requires stability in the costless game plus: no observationally
    equivalent unilateral alternative of equal goal status is strictly
    cheaper (payments cannot separate such a pair).
    """
    costless = game.costless()
    if not is_nash_equilibrium(costless, v):
        return False
    for agent in range(game.n_agents):
        wins_here = game.wins(agent, v)
        for w in game.unilateral_alternatives(v, agent):
            if not game.indistinguishable(v, w):
                continue
            if game.wins(agent, w) == wins_here and game.cost(agent, w) < game.cost(agent, v):
                return False
    return True


def inducible_equilibria(game) -> list[Valuation]:
    return [v for v in game.profiles() if is_inducible_equilibrium(game, v)]


def is_soft_equilibrium(game, v: Valuation) -> bool:
    """Equilibrium that some contract can eliminate: some agent has a
    distinguishable unilateral alternative of equal goal status."""
    if not is_nash_equilibrium(game, v):
        return False
    for agent in range(game.n_agents):
        wins_here = game.wins(agent, v)
        for w in game.unilateral_alternatives(v, agent):
            if game.indistinguishable(v, w):
                continue
            if game.wins(agent, w) == wins_here:
                return True
    return False


def soft_equilibria(game) -> list[Valuation]:
    return [v for v in nash_equilibria(game) if is_soft_equilibrium(game, v)]


def hard_equilibria(game) -> list[Valuation]:
    return [v for v in nash_equilibria(game) if not is_soft_equilibrium(game, v)]


# ---------------------------------------------------------------------------
# Deviation graphs


@dataclass(frozen=True)
class DeviationGraph:
    """Directed graph over valuations with agent-labelled edges.

    Adjacency maps each source to its successors, each carrying the set of
    agents whose deviation the edge represents. Parallel labels share one
    edge entry.
    """

    vertices: tuple[Valuation, ...]
    adjacency: Mapping[Valuation, Mapping[Valuation, frozenset[int]]]

    def edges(self) -> Iterator[tuple[Valuation, Valuation, int]]:
        for source in sorted(self.adjacency):
            for target in sorted(self.adjacency[source]):
                for agent in sorted(self.adjacency[source][target]):
                    yield source, target, agent

    def edge_count(self) -> int:
        return sum(1 for _ in self.edges())


def build_deviation_graph(edges: Iterator[tuple[Valuation, Valuation, int]] | list) -> DeviationGraph:
    adjacency: dict[Valuation, dict[Valuation, set[int]]] = {}
    vertices: set[Valuation] = set()
    for source, target, agent in edges:
        vertices.add(source)
        vertices.add(target)
        adjacency.setdefault(source, {}).setdefault(target, set()).add(agent)
    frozen = {
        source: {target: frozenset(agents) for target, agents in targets.items()}
        for source, targets in adjacency.items()
    }
    return DeviationGraph(vertices=tuple(sorted(vertices)), adjacency=frozen)


def potential_deviation_graph(game) -> DeviationGraph:
    """All profiles, with an edge for every inducible unilateral deviation."""
    adjacency: dict[Valuation, dict[Valuation, frozenset[int]]] = {}
    vertices = tuple(game.profiles())
    for v in vertices:
        targets: dict[Valuation, set[int]] = {}
        for agent in range(game.n_agents):
            for w in game.unilateral_alternatives(v, agent):
                if is_inducible_deviation(game, v, w, agent):
                    targets.setdefault(w, set()).add(agent)
        if targets:
            adjacency[v] = {w: frozenset(agents) for w, agents in targets.items()}
    return DeviationGraph(vertices=vertices, adjacency=adjacency)


def contract_deviation_graph(induced) -> DeviationGraph:
    """Edges are exactly the moves strictly beneficial under the contract.

    Takes an induced-game view; the result is the deviation graph the
    contract realizes out of the potential deviation graph.
    """
    adjacency: dict[Valuation, dict[Valuation, frozenset[int]]] = {}
    vertices = tuple(induced.profiles())
    for v in vertices:
        targets: dict[Valuation, set[int]] = {}
        for agent in range(induced.n_agents):
            current = induced.utility(agent, v)
            for w in induced.unilateral_alternatives(v, agent):
                if induced.utility(agent, w) > current:
                    targets.setdefault(w, set()).add(agent)
        if targets:
            adjacency[v] = {w: frozenset(agents) for w, agents in targets.items()}
    return DeviationGraph(vertices=vertices, adjacency=adjacency)


def graph_edge_kind(game, source: Valuation, target: Valuation, agent: int) -> DeviationKind:
    if is_soft_deviation(game, source, target, agent):
        return DeviationKind.SOFT
    if is_hard_deviation(game, source, target, agent):
        return DeviationKind.HARD
    return DeviationKind.INITIAL


@dataclass(frozen=True)
class ObservedPath:
    """A sequence of observations witnessed by profiles and deviating agents.

    ``observations[j]`` is the observation of ``witness_profiles[j]``;
    ``agents[j]`` labels the step from position j to j+1.
    """

    observations: tuple[Observation, ...]
    witness_profiles: tuple[Valuation, ...]
    agents: tuple[int, ...]


def agent_projection(game, graph: DeviationGraph, agent: int) -> dict[Observation, dict[Observation, tuple[Valuation, Valuation]]]:
    """Project one agent's edges onto observation space.

    Each projected edge keeps one concrete witness edge (the canonically
    smallest) for path reconstruction.
    """
    projected: dict[Observation, dict[Observation, tuple[Valuation, Valuation]]] = {}
    for source, target, edge_agent in graph.edges():
        if edge_agent != agent:
            continue
        o_source = game.observation(source)
        o_target = game.observation(target)
        bucket = projected.setdefault(o_source, {})
        if o_target not in bucket or (source, target) < bucket[o_target]:
            bucket[o_target] = (source, target)
    return projected


def projection_cycle(projected: Mapping[Observation, Mapping[Observation, tuple]]) -> Optional[list[Observation]]:
    """Smallest-start, shortest cycle in a projected graph (self-loops count)."""
    for start in sorted(projected):
        if start in projected.get(start, {}):
            return [start, start]
        # BFS back to the start; parents reconstruct the shortest route.
        parents: dict[Observation, Optional[Observation]] = {}
        queue: list[Observation] = []
        for successor in sorted(projected.get(start, ())):
            if successor not in parents:
                parents[successor] = None
                queue.append(successor)
        while queue:
            node = queue.pop(0)
            for successor in sorted(projected.get(node, ())):
                if successor == start:
                    path = [node]
                    while parents[path[-1]] is not None:
                        path.append(parents[path[-1]])
                    path.reverse()
                    return [start] + path + [start]
                if successor not in parents:
                    parents[successor] = node
                    queue.append(successor)
    return None


_PATH_SEARCH_BUDGET = 200_000


def _single_agent_path_cycle(game, graph: DeviationGraph, agent: int) -> Optional[ObservedPath]:
    """Depth-first search for an in-graph deviation path of one agent whose
    first observation recurs. Start vertices and successors are visited in
    canonical order, so the result is deterministic. Gives up after a fixed
    step budget (the caller falls back to a projection-based rendering)."""

    def successors(v: Valuation) -> list[Valuation]:
        bucket = graph.adjacency.get(v, {})
        return [w for w in sorted(bucket) if agent in bucket[w]]

    steps = 0
    for start in graph.vertices:
        first_obs = game.observation(start)
        stack: list[tuple[list[Valuation], list[Valuation]]] = [([start], successors(start))]
        while stack:
            steps += 1
            if steps > _PATH_SEARCH_BUDGET:
                return None
            path, pending = stack[-1]
            if not pending:
                stack.pop()
                continue
            nxt = pending.pop(0)
            if game.observation(nxt) == first_obs:
                profiles = path + [nxt]
                return ObservedPath(
                    observations=tuple(game.observation(p) for p in profiles),
                    witness_profiles=tuple(profiles),
                    agents=tuple(agent for _ in range(len(profiles) - 1)),
                )
            if nxt in path:
                continue
            stack.append((path + [nxt], successors(nxt)))
    return None


def find_single_agent_observed_cycle(game, graph: DeviationGraph) -> Optional[ObservedPath]:
    """First single-agent observed cycle in the graph, or None.

    Existence is decided on the per-agent observation projections. The
    reported path prefers an actual deviation path inside the graph whose
    first observation recurs; when the cycle only exists through
    observation-equivalent hops between edges, it is reconstructed from the
    projection with canonical witnesses.
    """
    for agent in range(game.n_agents):
        projected = agent_projection(game, graph, agent)
        cycle = projection_cycle(projected)
        if cycle is None:
            continue
        direct = _single_agent_path_cycle(game, graph, agent)
        if direct is not None:
            return direct
        witnesses = []
        for j in range(len(cycle) - 1):
            source, target = projected[cycle[j]][cycle[j + 1]]
            witnesses.append(source)
            if j == len(cycle) - 2:
                witnesses.append(target)
        return ObservedPath(
            observations=tuple(cycle),
            witness_profiles=tuple(witnesses),
            agents=tuple(agent for _ in range(len(cycle) - 1)),
        )
    return None


def projection_is_acyclic(projected: Mapping[Observation, Mapping[Observation, tuple]]) -> bool:
    """Cycle check (self-loops count) via iterative depth-first search."""
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[Observation, int] = {}
    for root in projected:
        if color.get(root, WHITE) != WHITE:
            continue
        stack: list[tuple[Observation, list[Observation]]] = [(root, sorted(projected.get(root, ())))]
        color[root] = GREY
        while stack:
            node, pending = stack[-1]
            if not pending:
                color[node] = BLACK
                stack.pop()
                continue
            nxt = pending.pop(0)
            state = color.get(nxt, WHITE)
            if state == GREY:
                return False
            if state == WHITE:
                color[nxt] = GREY
                stack.append((nxt, sorted(projected.get(nxt, ()))))
    return True


def projection_longest_paths(projected: Mapping[Observation, Mapping[Observation, tuple]]) -> dict[Observation, int]:
    """Longest edge count from each observation through an acyclic projection."""
    memo: dict[Observation, int] = {}

    def depth(node: Observation) -> int:
        if node in memo:
            return memo[node]
        best = 0
        for successor in projected.get(node, ()):
            best = max(best, 1 + depth(successor))
        memo[node] = best
        return best

    for node in list(projected):
        depth(node)
        for successor in projected[node]:
            depth(successor)
    return memo


# ---------------------------------------------------------------------------
# DOT export


def graph_to_dot(game, graph: DeviationGraph, highlight: Optional[ObservedPath] = None) -> str:
    """Deterministic DOT text: hard edges solid, soft dashed, cycle members
    double-bordered."""
    highlighted = set(highlight.witness_profiles) if highlight is not None else set()
    lines = ["digraph deviations {", "  rankdir=LR;"]
    for v in graph.vertices:
        label = f"{valuation_text(game, v)}\\nobs {observation_text(game, game.observation(v))}"
        extra = ", peripheries=2, color=red" if v in highlighted else ""
        lines.append(f'  "{valuation_text(game, v)}" [label="{label}"{extra}];')
    for source, target, agent in graph.edges():
        kind = graph_edge_kind(game, source, target, agent)
        style = "dashed" if kind == DeviationKind.SOFT else "solid"
        lines.append(
            f'  "{valuation_text(game, source)}" -> "{valuation_text(game, target)}"'
            f' [label="agent {agent + 1}", style={style}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
