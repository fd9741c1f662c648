import random

import pytest
from hypothesis import given, settings

from contractgames.deviations import (
    DeviationKind,
    build_deviation_graph,
    contract_deviation_graph,
    deviating_agent,
    find_single_agent_observed_cycle,
    graph_edge_kind,
    graph_to_dot,
    hard_equilibria,
    inducible_equilibria,
    is_hard_deviation,
    is_inducible_deviation,
    is_inducible_equilibrium,
    is_initial_deviation,
    is_soft_deviation,
    potential_deviation_graph,
    soft_equilibria,
)
from contractgames.contracts import build_contract, induced_game
from contractgames.equilibria import initial_equilibria, nash_equilibria
from contractgames.formula import Const, Var, parse_formula
from contractgames.game import build_game

from .oracles import (
    _stabilizing_payments,
    oracle_inducible_deviation,
    oracle_inducible_equilibrium,
    oracle_removable_equilibrium,
)
from .strategies import games


def test_unilateral_preconditions(b2):
    with pytest.raises(ValueError, match="identical"):
        is_initial_deviation(b2, (0, 0), (0, 0), 0)
    with pytest.raises(ValueError, match="outside the control"):
        is_initial_deviation(b2, (0, 0), (1, 1), 0)
    with pytest.raises(ValueError, match="outside the control"):
        is_initial_deviation(b2, (0, 0), (0, 1), 0)
    assert deviating_agent(b2, (0, 0), (1, 0)) == 0
    assert deviating_agent(b2, (0, 0), (0, 1)) == 1
    with pytest.raises(ValueError, match="more than one agent"):
        deviating_agent(b2, (0, 0), (1, 1))


def test_initial_deviation_examples(b2):
    assert is_initial_deviation(b2, (0, 0), (1, 0), 0)  # trivial goals
    owner = build_game(
        variables=("p1", "p2"),
        control=[(0,), (1,)],
        goals=(Var(0, "p1"), Const(True)),
    )
    assert not is_initial_deviation(owner, (1, 0), (0, 0), 0)  # winner turns loser
    assert is_initial_deviation(owner, (0, 0), (0, 1), 1)
    # loser stays loser: vacuously fine
    loser = build_game(
        variables=("p1", "p2"),
        control=[(0,), (1,)],
        goals=(Const(False), Const(True)),
    )
    assert is_initial_deviation(loser, (0, 0), (1, 0), 0)


def test_inducible_deviation_examples(b2, fig2):
    assert is_inducible_deviation(b2, (0, 0), (1, 0), 0)  # distinguishable
    # indistinguishable and costlier for agent 2: not inducible
    assert not is_inducible_deviation(b2, (0, 0), (0, 1), 1)
    assert is_inducible_deviation(fig2, (1, 0, 0), (0, 1, 0), 0)


def test_soft_and_hard_deviations(fig2):
    assert is_soft_deviation(fig2, (1, 0, 0), (0, 1, 0), 0)
    assert is_soft_deviation(fig2, (0, 1, 0), (1, 0, 0), 0)
    owner = build_game(
        variables=("p1", "p2"),
        control=[(0,), (1,)],
        goals=(Var(0, "p1"), Const(True)),
        observable=(0,),
    )
    # Gaining the goal is inducible; giving it up is not.
    assert is_hard_deviation(owner, (0, 0), (1, 0), 0)
    assert not is_soft_deviation(owner, (0, 0), (1, 0), 0)


@settings(max_examples=40, deadline=None)
@given(games(max_vars=3))
def test_soft_and_hard_deviations_are_exclusive_and_soft_is_symmetric(game):
    for v in game.profiles():
        for agent in range(game.n_agents):
            for w in game.unilateral_alternatives(v, agent):
                soft = is_soft_deviation(game, v, w, agent)
                hard = is_hard_deviation(game, v, w, agent)
                assert not (soft and hard)
                if soft:
                    assert is_soft_deviation(game, w, v, agent)


@settings(max_examples=40, deadline=None)
@given(games(max_vars=4))
def test_inducible_deviation_matches_contract_search(game):
    for v in game.profiles():
        for agent in range(game.n_agents):
            for w in game.unilateral_alternatives(v, agent):
                claimed = is_inducible_deviation(game, v, w, agent)
                found, contract = oracle_inducible_deviation(game, v, w, agent)
                assert claimed == found
                if found:
                    from contractgames.contracts import contract_utility

                    assert contract_utility(game, contract, agent, w) > contract_utility(
                        game, contract, agent, v
                    )


def test_inducible_equilibria_examples(b2):
    assert is_inducible_equilibrium(b2, (1, 1))
    assert not is_inducible_equilibrium(b2, (1, 0))
    assert inducible_equilibria(b2) == [(0, 0), (1, 1)]


@settings(max_examples=30, deadline=None)
@given(games(max_vars=3))
def test_full_observability_makes_all_initial_equilibria_inducible(game):
    fully = build_game(
        variables=game.variables,
        control=game.control,
        goals=game.goals,
        observable=range(len(game.variables)),
        defaults=game.costs.defaults,
        overrides=game.costs.overrides,
    )
    assert inducible_equilibria(fully) == initial_equilibria(fully)


@settings(max_examples=25, deadline=None)
@given(games(max_vars=3))
def test_inducible_equilibria_match_contract_search(game):
    for v in game.profiles():
        claimed = is_inducible_equilibrium(game, v)
        found, contract = oracle_inducible_equilibrium(game, v)
        assert claimed == found
        if found:
            assert v in set(nash_equilibria(induced_game(game, contract)))


@settings(max_examples=25, deadline=None)
@given(games(max_vars=3))
def test_soft_hard_match_contract_search(game):
    ne = nash_equilibria(game)
    soft = set(soft_equilibria(game))
    hard = set(hard_equilibria(game))
    assert soft | hard == set(ne)
    assert soft & hard == set()
    for v in ne:
        removable, _ = oracle_removable_equilibrium(game, v)
        assert (v in soft) == removable
        assert (v in hard) == (not removable)


def test_stabilizing_payment_assembly_agrees_with_full_enumeration():
    rng = random.Random(4242)
    from contractgames.generators import random_game

    checked = 0
    for _ in range(120):
        game = random_game(rng, max_vars=3, max_agents=2)
        for v in game.profiles():
            for agent in range(game.n_agents):
                full = _stabilizing_payments(game, agent, v)
                composed = _stabilizing_payments(game, agent, v, full_enumeration_limit=1)
                assert (full is None) == (composed is None)
                checked += 1
    assert checked > 100


def test_b2_soft_hard(b2):
    assert soft_equilibria(b2) == [(0, 0)]
    assert hard_equilibria(b2) == []


def test_unobservable_game_has_only_hard_equilibria():
    game = build_game(
        variables=("p1", "p2"),
        control=[(0,), (1,)],
        goals=(Var(0, "p1"), Const(True)),
        observable=(),
        overrides=[{}, {(0, 0): 1}],
    )
    ne = nash_equilibria(game)
    assert ne
    assert hard_equilibria(game) == ne
    assert soft_equilibria(game) == []


# ---------------------------------------------------------------------------
# Graphs and observed cycles


def test_potential_graph_contains_the_example_path(fig2):
    graph = potential_deviation_graph(fig2)
    assert 0 in graph.adjacency[(1, 0, 0)][(0, 1, 0)]
    assert 0 in graph.adjacency[(0, 1, 0)][(1, 1, 0)]


def test_potential_graph_no_edges_case():
    game = build_game(
        variables=("p1", "p2"),
        control=[(0,), (1,)],
        goals=(Const(False), Const(False)),
        observable=(),
    )
    graph = potential_deviation_graph(game)
    assert graph.edge_count() == 0


@settings(max_examples=25, deadline=None)
@given(games(max_vars=3))
def test_potential_graph_edges_match_pairwise_recount(game):
    graph = potential_deviation_graph(game)
    expected = 0
    for v in game.profiles():
        for agent in range(game.n_agents):
            for w in game.unilateral_alternatives(v, agent):
                if is_inducible_deviation(game, v, w, agent):
                    expected += 1
                    assert agent in graph.adjacency[v][w]
    assert graph.edge_count() == expected


def test_observed_cycle_on_example_path(fig2):
    path = build_deviation_graph([((1, 0, 0), (0, 1, 0), 0), ((0, 1, 0), (1, 1, 0), 0)])
    cycle = find_single_agent_observed_cycle(fig2, path)
    assert cycle is not None
    assert cycle.observations == ((1,), (0,), (1,))
    assert cycle.witness_profiles == ((1, 0, 0), (0, 1, 0), (1, 1, 0))
    assert set(cycle.agents) == {0}


def test_observed_cycle_ignores_multi_agent_alternation(fig2):
    # The same observation pattern as the example path, but the steps belong
    # to different agents, so no single-agent cycle exists.
    path = build_deviation_graph([((1, 0, 0), (0, 1, 0), 0), ((0, 1, 1), (1, 1, 0), 1)])
    assert find_single_agent_observed_cycle(fig2, path) is None


def test_observed_cycle_empty_graph(fig2):
    empty = build_deviation_graph([])
    assert find_single_agent_observed_cycle(fig2, empty) is None


def test_observed_cycle_self_loop_counts(b2):
    # An edge between observationally equivalent profiles is already a cycle.
    loop = build_deviation_graph([((1, 0), (1, 1), 1)])
    cycle = find_single_agent_observed_cycle(b2, loop)
    assert cycle is not None
    assert cycle.observations == ((1,), (1,))


def test_observed_cycle_through_equivalence_jumps(fig2):
    # (1,1,0) -> (0,1,0) and (0,0,0)... the second edge starts at a profile
    # equivalent to the first edge's target, not at the target itself.
    graph = build_deviation_graph([((1, 1, 0), (0, 1, 0), 0), ((0, 0, 0), (1, 1, 0), 0)])
    cycle = find_single_agent_observed_cycle(fig2, graph)
    assert cycle is not None
    first = cycle.observations[0]
    assert cycle.observations[-1] == first
    assert len(cycle.observations) >= 2


def test_contract_deviation_graph(b2):
    kappa = build_contract(b2, overrides=[{(1,): 10}, {}])
    graph = contract_deviation_graph(induced_game(b2, kappa))
    assert 0 in graph.adjacency[(0, 0)][(1, 0)]
    assert (0, 0) not in graph.adjacency.get((1, 0), {})


def test_graph_edge_kinds(fig2):
    assert graph_edge_kind(fig2, (1, 0, 0), (0, 1, 0), 0) == DeviationKind.SOFT
    owner = build_game(
        variables=("p1", "p2"),
        control=[(0,), (1,)],
        goals=(Var(0, "p1"), Const(True)),
        observable=(0,),
    )
    assert graph_edge_kind(owner, (0, 0), (1, 0), 0) == DeviationKind.HARD


def test_dot_export_is_deterministic_and_styled(fig2):
    graph = potential_deviation_graph(fig2)
    cycle = find_single_agent_observed_cycle(fig2, graph)
    first = graph_to_dot(fig2, graph, highlight=cycle)
    second = graph_to_dot(fig2, graph, highlight=cycle)
    assert first == second
    assert "digraph deviations" in first
    assert "agent 1" in first
    assert "style=dashed" in first
    assert "peripheries=2" in first
