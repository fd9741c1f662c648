"""Boolean games with costs, valuations, and the observation machinery.

A valuation is a tuple of 0/1 ints indexed by the game's canonical variable
order (declaration order). Tuples compare lexicographically, which coincides
with reading a valuation as a binary number, so sorted output is stable and
matches the usual truth-table row order. All numeric quantities are exact
``fractions.Fraction`` values; nothing in the engine touches floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .formula import (
    Formula,
    FormulaError,
    IDENT_RE,
    evaluate,
    parse_formula,
    print_formula,
    variables_of,
)

Valuation = tuple[int, ...]
Observation = tuple[int, ...]

#: Exhaustive enumeration is the only evaluation strategy; refuse games where
#: 2^|variables| is out of desk range.
MAX_ENUMERATION_VARS = 24


class GameValidationError(ValueError):
    """A structurally invalid game description."""


class GameFormatError(ValueError):
    """A malformed game or contract file."""

    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def restrict(valuation: Sequence[int], indices: Sequence[int]) -> tuple[int, ...]:
    """Restriction of a valuation to the given variable positions."""
    return tuple(valuation[j] for j in indices)


def all_valuations(width: int) -> Iterator[Valuation]:
    """All 0/1 tuples of the given width in canonical (binary) order."""
    if width > MAX_ENUMERATION_VARS:
        raise GameValidationError(
            f"{width} variables exceeds the enumeration cap of {MAX_ENUMERATION_VARS}"
        )
    return itertools.product((0, 1), repeat=width)


@dataclass(frozen=True)
class CostTable:
    """Sparse per-agent cost function: a default plus explicit overrides."""

    defaults: tuple[Fraction, ...]
    overrides: tuple[Mapping[Valuation, Fraction], ...]

    def cost(self, agent: int, valuation: Valuation) -> Fraction:
        return self.overrides[agent].get(valuation, self.defaults[agent])


def zero_costs(n_agents: int) -> CostTable:
    return CostTable(
        defaults=tuple(Fraction(0) for _ in range(n_agents)),
        overrides=tuple({} for _ in range(n_agents)),
    )


@dataclass(frozen=True)
class BooleanGame:
    """A Boolean game with costs plus the principal's observable set.

    ``control[i]`` holds the canonical-order variable indices owned by agent
    ``i`` (agents are 0-indexed internally; presentation code renders them
    1-indexed). ``observable`` holds the canonical-order indices of the
    variables the principal sees.
    """

    variables: tuple[str, ...]
    control: tuple[tuple[int, ...], ...]
    goals: tuple[Formula, ...]
    costs: CostTable
    observable: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.control:
            raise GameValidationError("a game needs at least one agent")
        if not self.variables:
            raise GameValidationError("a game needs at least one variable")
        for name in self.variables:
            if not IDENT_RE.fullmatch(name):
                raise GameValidationError(f"invalid variable name {name!r}")
        if len(set(self.variables)) != len(self.variables):
            raise GameValidationError("duplicate variable names")
        m = len(self.variables)
        seen: dict[int, int] = {}
        for agent, owned in enumerate(self.control):
            if not owned:
                raise GameValidationError(f"agent {agent + 1} controls no variables")
            for j in owned:
                if not 0 <= j < m:
                    raise GameValidationError(f"agent {agent + 1} controls unknown variable #{j}")
                if j in seen:
                    raise GameValidationError(
                        f"variable {self.variables[j]} controlled by agents "
                        f"{seen[j] + 1} and {agent + 1}"
                    )
                seen[j] = agent
        if len(seen) != m:
            missing = [self.variables[j] for j in range(m) if j not in seen]
            raise GameValidationError(f"uncontrolled variables: {', '.join(missing)}")
        if len(self.goals) != self.n_agents:
            raise GameValidationError("one goal per agent is required")
        for agent, goal in enumerate(self.goals):
            bad = [j for j in variables_of(goal) if j >= m]
            if bad:
                raise GameValidationError(f"goal of agent {agent + 1} mentions unknown variables")
        if len(self.costs.defaults) != self.n_agents or len(self.costs.overrides) != self.n_agents:
            raise GameValidationError("cost table does not cover every agent")
        for agent in range(self.n_agents):
            if self.costs.defaults[agent] < 0:
                raise GameValidationError(f"negative default cost for agent {agent + 1}")
            for valuation, value in self.costs.overrides[agent].items():
                if len(valuation) != m:
                    raise GameValidationError("cost override key has wrong width")
                if value < 0:
                    raise GameValidationError(f"negative cost for agent {agent + 1}")
        for j in self.observable:
            if not 0 <= j < m:
                raise GameValidationError("observable set mentions unknown variable")
        if list(self.observable) != sorted(set(self.observable)):
            raise GameValidationError("observable set must be strictly increasing")

    @property
    def n_agents(self) -> int:
        return len(self.control)

    @cached_property
    def c_star(self) -> tuple[Fraction, ...]:
        """Per-agent maximal cost over the full valuation space.

        The sparse table makes the maximum available without enumerating all
        2^m valuations: the default participates whenever some valuation is
        left to it. Equality with the enumerated maximum is covered by tests.
        """
        full = 2 ** len(self.variables)
        out = []
        for agent in range(self.n_agents):
            values = list(self.costs.overrides[agent].values())
            if len(self.costs.overrides[agent]) < full:
                values.append(self.costs.defaults[agent])
            out.append(max(values))
        return tuple(out)

    def owner(self, variable: int) -> int:
        for agent, owned in enumerate(self.control):
            if variable in owned:
                return agent
        raise KeyError(variable)

    def profiles(self) -> Iterator[Valuation]:
        return all_valuations(len(self.variables))

    def cost(self, agent: int, valuation: Valuation) -> Fraction:
        return self.costs.cost(agent, valuation)

    def wins(self, agent: int, valuation: Valuation) -> bool:
        return evaluate(self.goals[agent], valuation)

    def winners(self, valuation: Valuation) -> frozenset[int]:
        return frozenset(i for i in range(self.n_agents) if self.wins(i, valuation))

    def utility(self, agent: int, valuation: Valuation) -> Fraction:
        """Goal satisfaction dominates; costs order outcomes within a tier."""
        if self.wins(agent, valuation):
            return 1 + self.c_star[agent] - self.cost(agent, valuation)
        return -self.cost(agent, valuation)

    def costless(self) -> "BooleanGame":
        return BooleanGame(
            variables=self.variables,
            control=self.control,
            goals=self.goals,
            costs=zero_costs(self.n_agents),
            observable=self.observable,
        )

    def observation(self, valuation: Valuation) -> Observation:
        return restrict(valuation, self.observable)

    def observations(self) -> Iterator[Observation]:
        return itertools.product((0, 1), repeat=len(self.observable))

    def indistinguishable(self, v: Valuation, w: Valuation) -> bool:
        return self.observation(v) == self.observation(w)

    def consistent(self, valuation: Valuation, observation: Observation) -> bool:
        if len(observation) != len(self.observable):
            raise GameValidationError("observation width does not match the observable set")
        return self.observation(valuation) == observation

    def with_strategy(self, valuation: Valuation, agent: int, bits: Sequence[int]) -> Valuation:
        """Replace agent's coordinates, leaving everyone else fixed."""
        out = list(valuation)
        for j, bit in zip(self.control[agent], bits):
            out[j] = bit
        return tuple(out)

    def strategy_of(self, valuation: Valuation, agent: int) -> tuple[int, ...]:
        return restrict(valuation, self.control[agent])

    def unilateral_alternatives(self, valuation: Valuation, agent: int) -> Iterator[Valuation]:
        """All profiles reachable by the agent alone, lexicographic, self excluded."""
        current = self.strategy_of(valuation, agent)
        for bits in itertools.product((0, 1), repeat=len(self.control[agent])):
            if bits != current:
                yield self.with_strategy(valuation, agent, bits)


# ---------------------------------------------------------------------------
# Text rendering of valuations and observations


def valuation_text(game: BooleanGame, valuation: Valuation) -> str:
    return ",".join(f"{name}={bit}" for name, bit in zip(game.variables, valuation))


def observation_text(game: BooleanGame, observation: Observation) -> str:
    if not game.observable:
        return "()"
    return ",".join(
        f"{game.variables[j]}={bit}" for j, bit in zip(game.observable, observation)
    )


def _parse_assignment(game: BooleanGame, text: str) -> dict[int, int]:
    assignment: dict[int, int] = {}
    text = text.strip()
    if not text or text == "()":
        return assignment
    for part in text.split(","):
        if "=" not in part:
            raise GameFormatError(f"expected name=bit, found {part.strip()!r}")
        name, _, bit = part.partition("=")
        name, bit = name.strip(), bit.strip()
        if name not in game.variables:
            raise GameFormatError(f"unknown variable {name!r}")
        if bit not in ("0", "1"):
            raise GameFormatError(f"expected 0 or 1 for {name}, found {bit!r}")
        index = game.variables.index(name)
        if index in assignment:
            raise GameFormatError(f"variable {name} assigned twice")
        assignment[index] = int(bit)
    return assignment


def parse_valuation(game: BooleanGame, text: str) -> Valuation:
    """Parse a full ``name=bit`` list covering every variable."""
    assignment = _parse_assignment(game, text)
    missing = [game.variables[j] for j in range(len(game.variables)) if j not in assignment]
    if missing:
        raise GameFormatError(f"valuation leaves variables unassigned: {', '.join(missing)}")
    return tuple(assignment[j] for j in range(len(game.variables)))


def parse_observation(game: BooleanGame, text: str) -> Observation:
    """Parse a ``name=bit`` list covering exactly the observable set."""
    assignment = _parse_assignment(game, text)
    if sorted(assignment) != list(game.observable):
        expected = ", ".join(game.variables[j] for j in game.observable) or "(nothing)"
        raise GameFormatError(f"observation must assign exactly: {expected}")
    return tuple(assignment[j] for j in game.observable)


# ---------------------------------------------------------------------------
# Rational literals


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            numerator, denominator = int(num), int(den)
        except ValueError:
            raise GameFormatError(f"malformed rational {text!r}") from None
        if denominator <= 0:
            raise GameFormatError(f"rational denominator must be positive in {text!r}")
        return Fraction(numerator, denominator)
    try:
        return Fraction(int(text))
    except ValueError:
        raise GameFormatError(f"malformed rational {text!r}") from None


def rational_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# Game file format (line oriented, '#' comments)


def parse_game(text: str) -> BooleanGame:
    """Parse the line-oriented game format into a validated game."""
    n_agents: int | None = None
    variables: list[str] = []
    control: dict[int, list[str]] = {}
    goal_texts: dict[int, tuple[str, int]] = {}
    observable: list[str] | None = None
    defaults: dict[int, Fraction] = {}
    overrides: list[tuple[int, str, Fraction, int]] = []

    def parse_agent(token: str, line_no: int) -> int:
        try:
            agent = int(token)
        except ValueError:
            raise GameFormatError(f"expected an agent number, found {token!r}", line_no) from None
        if n_agents is None or not 1 <= agent <= n_agents:
            raise GameFormatError(f"agent {agent} out of range", line_no)
        return agent - 1

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword == "agents":
            if n_agents is not None:
                raise GameFormatError("duplicate agents line", line_no)
            try:
                n_agents = int(rest.strip())
            except ValueError:
                raise GameFormatError(f"malformed agent count {rest.strip()!r}", line_no) from None
            if n_agents < 1:
                raise GameFormatError("agent count must be at least 1", line_no)
        elif keyword == "vars":
            if variables:
                raise GameFormatError("duplicate vars line", line_no)
            variables = rest.split()
            if not variables:
                raise GameFormatError("vars line declares no variables", line_no)
        elif keyword.startswith("control"):
            head, _, names = line.partition(":")
            agent = parse_agent(head.split()[1] if len(head.split()) > 1 else "", line_no)
            if agent in control:
                raise GameFormatError(f"duplicate control line for agent {agent + 1}", line_no)
            control[agent] = names.split()
        elif keyword.startswith("goal"):
            head, _, formula_text = line.partition(":")
            agent = parse_agent(head.split()[1] if len(head.split()) > 1 else "", line_no)
            if agent in goal_texts:
                raise GameFormatError(f"duplicate goal line for agent {agent + 1}", line_no)
            goal_texts[agent] = (formula_text.strip(), line_no)
        elif keyword.startswith("observable"):
            if observable is not None:
                raise GameFormatError("duplicate observable line", line_no)
            _, _, names = line.partition(":")
            observable = names.split()
        elif keyword == "costdefault":
            head, _, value = line.partition(":")
            agent = parse_agent(head.split()[1] if len(head.split()) > 1 else "", line_no)
            if agent in defaults:
                raise GameFormatError(f"duplicate costdefault for agent {agent + 1}", line_no)
            try:
                defaults[agent] = parse_rational(value)
            except GameFormatError as exc:
                raise GameFormatError(str(exc), line_no) from None
        elif keyword == "cost":
            head, _, value = line.partition(":")
            agent = parse_agent(head.split()[1] if len(head.split()) > 1 else "", line_no)
            assignment_text, arrow, amount = value.partition("->")
            if not arrow:
                raise GameFormatError("cost line needs '-> <rational>'", line_no)
            try:
                overrides.append((agent, assignment_text.strip(), parse_rational(amount), line_no))
            except GameFormatError as exc:
                raise GameFormatError(str(exc), line_no) from None
        else:
            raise GameFormatError(f"unknown directive {keyword!r}", line_no)

    if n_agents is None:
        raise GameFormatError("missing agents line")
    if not variables:
        raise GameFormatError("missing vars line")
    if observable is None:
        raise GameFormatError("missing observable line")

    index_of: dict[str, int] = {}
    for name in variables:
        if not IDENT_RE.fullmatch(name):
            raise GameFormatError(f"invalid variable name {name!r}")
        if name in index_of:
            raise GameFormatError(f"duplicate variable {name!r}")
        index_of[name] = len(index_of)

    control_indices: list[tuple[int, ...]] = []
    for agent in range(n_agents):
        names = control.get(agent)
        if names is None:
            raise GameFormatError(f"missing control line for agent {agent + 1}")
        indices = []
        for name in names:
            if name not in index_of:
                raise GameFormatError(f"control of agent {agent + 1} names unknown variable {name!r}")
            indices.append(index_of[name])
        control_indices.append(tuple(sorted(indices)))

    goals: list[Formula] = []
    for agent in range(n_agents):
        if agent not in goal_texts:
            raise GameFormatError(f"missing goal line for agent {agent + 1}")
        formula_text, line_no = goal_texts[agent]
        try:
            goals.append(parse_formula(formula_text, variables))
        except FormulaError as exc:
            raise GameFormatError(f"goal of agent {agent + 1}: {exc}", line_no) from None

    observable_indices = []
    for name in observable:
        if name not in index_of:
            raise GameFormatError(f"observable set names unknown variable {name!r}")
        observable_indices.append(index_of[name])

    default_tuple = tuple(defaults.get(agent, Fraction(0)) for agent in range(n_agents))
    override_maps: list[dict[Valuation, Fraction]] = [{} for _ in range(n_agents)]
    skeleton = BooleanGame(
        variables=tuple(variables),
        control=tuple(control_indices),
        goals=tuple(goals),
        costs=CostTable(default_tuple, tuple(override_maps)),
        observable=tuple(sorted(set(observable_indices))),
    )
    for agent, assignment_text, amount, line_no in overrides:
        try:
            key = parse_valuation(skeleton, assignment_text)
        except GameFormatError as exc:
            raise GameFormatError(str(exc), line_no) from None
        if key in override_maps[agent]:
            raise GameFormatError(f"duplicate cost entry for agent {agent + 1}", line_no)
        if amount < 0:
            raise GameFormatError(f"negative cost for agent {agent + 1}", line_no)
        override_maps[agent][key] = amount

    return BooleanGame(
        variables=skeleton.variables,
        control=skeleton.control,
        goals=skeleton.goals,
        costs=CostTable(default_tuple, tuple(override_maps)),
        observable=skeleton.observable,
    )


def format_game(game: BooleanGame) -> str:
    """Canonical text for a game; parse(format(g)) reproduces it exactly."""
    lines = [f"agents {game.n_agents}", "vars " + " ".join(game.variables)]
    for agent, owned in enumerate(game.control):
        names = " ".join(game.variables[j] for j in owned)
        lines.append(f"control {agent + 1}: {names}")
    for agent, goal in enumerate(game.goals):
        lines.append(f"goal {agent + 1}: {print_formula(goal)}")
    lines.append("observable: " + " ".join(game.variables[j] for j in game.observable))
    for agent in range(game.n_agents):
        default = game.costs.defaults[agent]
        if default != 0:
            lines.append(f"costdefault {agent + 1}: {rational_text(default)}")
    for agent in range(game.n_agents):
        for key in sorted(game.costs.overrides[agent]):
            amount = game.costs.overrides[agent][key]
            lines.append(
                f"cost {agent + 1}: {valuation_text(game, key)} -> {rational_text(amount)}"
            )
    return "\n".join(lines) + "\n"


def load_game(path: str) -> BooleanGame:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_game(handle.read())


def build_game(
    variables: Sequence[str],
    control: Sequence[Sequence[int]],
    goals: Sequence[Formula],
    observable: Sequence[int] = (),
    defaults: Sequence[Fraction | int] | None = None,
    overrides: Sequence[Mapping[Valuation, Fraction | int]] | None = None,
) -> BooleanGame:
    """Convenience constructor that normalizes plain ints to Fractions."""
    n = len(control)
    default_tuple = tuple(
        Fraction(defaults[i]) if defaults is not None else Fraction(0) for i in range(n)
    )
    override_tuple = tuple(
        {k: Fraction(v) for k, v in (overrides[i] if overrides is not None else {}).items()}
        for i in range(n)
    )
    return BooleanGame(
        variables=tuple(variables),
        control=tuple(tuple(sorted(owned)) for owned in control),
        goals=tuple(goals),
        costs=CostTable(default_tuple, override_tuple),
        observable=tuple(sorted(observable)),
    )
