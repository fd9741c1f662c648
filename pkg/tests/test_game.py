import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

from contractgames.formula import Const, Var, parse_formula
from contractgames.game import (
    BooleanGame,
    CostTable,
    GameFormatError,
    GameValidationError,
    build_game,
    format_game,
    parse_game,
    parse_observation,
    parse_rational,
    parse_valuation,
    rational_text,
    restrict,
    valuation_text,
)

from .strategies import games


def test_fixture_games_validate(b1, b2, fig2):
    assert b1.n_agents == 2 and len(b1.variables) == 2
    assert b2.n_agents == 2
    assert fig2.n_agents == 2 and len(fig2.variables) == 3


def test_control_overlap_rejected():
    with pytest.raises(GameValidationError, match="controlled by agents"):
        build_game(
            variables=("p1", "p2"),
            control=[(0, 1), (0,)],
            goals=(Const(True), Const(True)),
        )


def test_empty_control_rejected():
    with pytest.raises(GameValidationError, match="controls no variables"):
        BooleanGame(
            variables=("p1",),
            control=((0,), ()),
            goals=(Const(True), Const(True)),
            costs=CostTable((Fraction(0), Fraction(0)), ({}, {})),
            observable=(),
        )


def test_negative_cost_rejected():
    with pytest.raises(GameValidationError, match="negative cost"):
        build_game(
            variables=("p1",),
            control=[(0,)],
            goals=(Const(True),),
            overrides=[{(0,): Fraction(-1)}],
        )


def test_goal_over_unknown_variable_rejected():
    with pytest.raises(GameValidationError, match="unknown variables"):
        build_game(
            variables=("p1",),
            control=[(0,)],
            goals=(Var(3, "q"),),
        )


def test_uncontrolled_variable_rejected():
    with pytest.raises(GameValidationError, match="uncontrolled"):
        build_game(
            variables=("p1", "p2"),
            control=[(0,)],
            goals=(Const(True),),
        )


def test_restrict():
    assert restrict((1, 0), (0,)) == (1,)
    assert restrict((1, 0, 0), (0,)) == (1,)
    assert restrict((1, 0), ()) == ()


def test_winners(b1, fig2):
    assert b1.winners((0, 1)) == frozenset({0, 1})
    assert b1.winners((1, 0)) == frozenset({0})
    assert fig2.winners((0, 1, 1)) == frozenset({0})


def test_costs_and_maxima(b1, b2):
    assert b1.cost(0, (1, 0)) == 3
    assert b1.c_star == (3, 1)
    assert b2.c_star == (10, 2)
    free = build_game(variables=("p1",), control=[(0,)], goals=(Const(True),))
    assert free.c_star == (0,)


def test_c_star_matches_enumeration(b1, b2, fig2):
    for game in (b1, b2, fig2):
        for agent in range(game.n_agents):
            enumerated = max(game.cost(agent, v) for v in game.profiles())
            assert game.c_star[agent] == enumerated


def test_utilities(b1):
    assert b1.utility(0, (0, 1)) == 3  # winner: 1 + 3 - 1
    assert b1.utility(1, (1, 1)) == 0  # loser with zero cost
    free = build_game(variables=("p1",), control=[(0,)], goals=(Const(True),))
    assert free.utility(0, (0,)) == 1  # zero-cost winner


def test_costless(b1, fig2):
    zero = b1.costless()
    assert all(zero.cost(i, v) == 0 for i in range(2) for v in zero.profiles())
    assert zero.costless() == zero
    assert fig2.costless() == fig2


def test_indistinguishable(fig2, b1):
    assert fig2.indistinguishable((0, 1, 0), (0, 0, 1))
    assert not fig2.indistinguishable((1, 0, 0), (0, 1, 0))
    blind = b1.costless()
    blind = build_game(
        variables=b1.variables,
        control=b1.control,
        goals=b1.goals,
        observable=(),
    )
    for v in blind.profiles():
        for w in blind.profiles():
            assert blind.indistinguishable(v, w)


def test_consistent(fig2, b1):
    assert fig2.consistent((1, 1, 1), (1,))
    assert not b1.consistent((0, 1), (1,))
    blind = build_game(
        variables=b1.variables, control=b1.control, goals=b1.goals, observable=()
    )
    assert all(blind.consistent(v, ()) for v in blind.profiles())


@settings(max_examples=60)
@given(games())
def test_utility_ranges(game):
    for agent in range(game.n_agents):
        top = game.c_star[agent]
        for v in game.profiles():
            u = game.utility(agent, v)
            if game.wins(agent, v):
                assert 1 <= u <= top + 1
            else:
                assert -top <= u <= 0


@settings(max_examples=60)
@given(games())
def test_observational_equivalence_relation(game):
    profiles = list(game.profiles())
    probe = profiles[:: max(1, len(profiles) // 4)]
    for v in probe:
        assert game.indistinguishable(v, v)
        for w in probe:
            assert game.indistinguishable(v, w) == game.indistinguishable(w, v)
            for x in probe:
                if game.indistinguishable(v, w) and game.indistinguishable(w, x):
                    assert game.indistinguishable(v, x)


@settings(max_examples=40)
@given(games())
def test_every_observation_has_a_consistent_valuation(game):
    for observation in game.observations():
        assert any(game.consistent(v, observation) for v in game.profiles())


@settings(max_examples=40)
@given(games())
def test_c_star_shortcut_equals_enumeration(game):
    for agent in range(game.n_agents):
        assert game.c_star[agent] == max(game.cost(agent, v) for v in game.profiles())


def test_exact_arithmetic_types(b1):
    assert isinstance(b1.cost(0, (0, 0)), Fraction)
    assert isinstance(b1.utility(0, (0, 0)), Fraction)
    assert isinstance(b1.c_star[0], Fraction)


# ---------------------------------------------------------------------------
# File format


def test_fixture_files_fixpoint(fixtures_dir):
    for name in ("b1.game", "b2.game", "fig2.game"):
        text = (fixtures_dir / name).read_text()
        once = format_game(parse_game(text))
        twice = format_game(parse_game(once))
        assert once == twice


@settings(max_examples=120)
@given(games())
def test_random_game_files_fixpoint(game):
    once = format_game(game)
    reparsed = parse_game(once)
    assert format_game(reparsed) == once
    assert reparsed == game


def test_parse_errors_carry_line_numbers():
    bad = "agents 2\nvars p1 p2\ncontrol 1: p1\ncontrol 2: p2\ngoal 1: T\ngoal 2: (p1\nobservable:\n"
    with pytest.raises(GameFormatError, match="line 6"):
        parse_game(bad)
    with pytest.raises(GameFormatError, match="line 3"):
        parse_game("agents 1\nvars p1\ncontrol 7: p1\n")


def test_parse_rejects_double_control():
    text = (
        "agents 2\nvars p1 p2\ncontrol 1: p1 p2\ncontrol 2: p2\n"
        "goal 1: T\ngoal 2: T\nobservable:\n"
    )
    with pytest.raises(GameValidationError, match="controlled by agents"):
        parse_game(text)


def test_parse_rejects_negative_cost():
    text = (
        "agents 1\nvars p1\ncontrol 1: p1\ngoal 1: T\nobservable:\n"
        "cost 1: p1=1 -> -1\n"
    )
    with pytest.raises(GameFormatError, match="negative cost|malformed rational"):
        parse_game(text)


def test_cost_line_must_cover_all_vars():
    text = (
        "agents 1\nvars p1 p2\ncontrol 1: p1 p2\ngoal 1: T\nobservable:\n"
        "cost 1: p1=1 -> 2\n"
    )
    with pytest.raises(GameFormatError, match="unassigned"):
        parse_game(text)


def test_rational_literals():
    assert parse_rational("3") == Fraction(3)
    assert parse_rational("5/2") == Fraction(5, 2)
    assert rational_text(Fraction(5, 2)) == "5/2"
    assert rational_text(Fraction(4, 2)) == "2"
    with pytest.raises(GameFormatError):
        parse_rational("5/0")
    with pytest.raises(GameFormatError):
        parse_rational("x")


def test_valuation_parsing(b1):
    assert parse_valuation(b1, "p1=1,p2=0") == (1, 0)
    assert valuation_text(b1, (1, 0)) == "p1=1,p2=0"
    with pytest.raises(GameFormatError, match="unassigned"):
        parse_valuation(b1, "p1=1")
    with pytest.raises(GameFormatError, match="unknown variable"):
        parse_valuation(b1, "p1=1,zz=0")


def test_observation_parsing(b1, fig2):
    assert parse_observation(b1, "p1=0") == (0,)
    with pytest.raises(GameFormatError, match="exactly"):
        parse_observation(b1, "p2=0")
    with pytest.raises(GameFormatError, match="exactly"):
        parse_observation(fig2, "p1=0,p2=0")
    blind = build_game(
        variables=b1.variables, control=b1.control, goals=b1.goals, observable=()
    )
    assert parse_observation(blind, "") == ()


def test_formula_in_goal_resolves_against_game_vocab(fig2):
    goal = fig2.goals[1]
    assert goal == parse_formula("p3 -> (p1 & p2)", fig2.variables)
