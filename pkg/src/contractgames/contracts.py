"""Contracts: per-agent nonnegative payments keyed by observation, and the
game view whose utilities include them.

A contract can only reward what the principal sees, so payments are total
functions on the observation space, stored sparsely as a default plus
overrides. The induced game is a view over the base game; it is never
materialized as a payoff table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from .game import (
    BooleanGame,
    GameFormatError,
    GameValidationError,
    Observation,
    Valuation,
    observation_text,
    parse_rational,
    rational_text,
)


@dataclass(frozen=True)
class Contract:
    """Payments for each agent at each observation (sparse, total)."""

    width: int
    defaults: tuple[Fraction, ...]
    overrides: tuple[Mapping[Observation, Fraction], ...]

    def __post_init__(self) -> None:
        for agent in range(len(self.defaults)):
            if self.defaults[agent] < 0:
                raise GameValidationError(f"negative default payment for agent {agent + 1}")
            for observation, amount in self.overrides[agent].items():
                if len(observation) != self.width:
                    raise GameValidationError("contract override has wrong observation width")
                if amount < 0:
                    raise GameValidationError(f"negative payment for agent {agent + 1}")

    @property
    def n_agents(self) -> int:
        return len(self.defaults)

    def payment(self, agent: int, observation: Observation) -> Fraction:
        return self.overrides[agent].get(observation, self.defaults[agent])

    @cached_property
    def max_payment(self) -> tuple[Fraction, ...]:
        """Per-agent maximum over the whole observation space.

        The default participates unless the overrides cover all 2^|O|
        observations, so the cached value is the true maximum, not just the
        maximum of the stored entries.
        """
        full = 2 ** self.width
        out = []
        for agent in range(self.n_agents):
            values = list(self.overrides[agent].values())
            if len(self.overrides[agent]) < full:
                values.append(self.defaults[agent])
            out.append(max(values))
        return tuple(out)


def null_contract(game: BooleanGame) -> Contract:
    """All payments zero; utilities coincide with the base game."""
    n = game.n_agents
    return Contract(
        width=len(game.observable),
        defaults=tuple(Fraction(0) for _ in range(n)),
        overrides=tuple({} for _ in range(n)),
    )


def contract_utility(game: BooleanGame, contract: Contract, agent: int, valuation: Valuation) -> Fraction:
    """Utility under a contract.

    Winners gain their payment on top of the base winner tier; losers are
    shifted down by the agent's maximum payment so that no payment schedule
    can lift a loser above any winner outcome.
    """
    pay = contract.payment(agent, game.observation(valuation))
    if game.wins(agent, valuation):
        return 1 + game.c_star[agent] + pay - game.cost(agent, valuation)
    return -contract.max_payment[agent] + pay - game.cost(agent, valuation)


@dataclass(frozen=True)
class InducedGame:
    """Game view with contract-modified utilities; queries delegate."""

    base: BooleanGame
    contract: Contract

    @property
    def variables(self):
        return self.base.variables

    @property
    def control(self):
        return self.base.control

    @property
    def goals(self):
        return self.base.goals

    @property
    def observable(self):
        return self.base.observable

    @property
    def costs(self):
        return self.base.costs

    @property
    def n_agents(self) -> int:
        return self.base.n_agents

    @property
    def c_star(self):
        return self.base.c_star

    def profiles(self):
        return self.base.profiles()

    def observations(self):
        return self.base.observations()

    def cost(self, agent: int, valuation: Valuation) -> Fraction:
        return self.base.cost(agent, valuation)

    def wins(self, agent: int, valuation: Valuation) -> bool:
        return self.base.wins(agent, valuation)

    def winners(self, valuation: Valuation):
        return self.base.winners(valuation)

    def observation(self, valuation: Valuation) -> Observation:
        return self.base.observation(valuation)

    def indistinguishable(self, v: Valuation, w: Valuation) -> bool:
        return self.base.indistinguishable(v, w)

    def consistent(self, valuation: Valuation, observation: Observation) -> bool:
        return self.base.consistent(valuation, observation)

    def with_strategy(self, valuation: Valuation, agent: int, bits: Sequence[int]) -> Valuation:
        return self.base.with_strategy(valuation, agent, bits)

    def strategy_of(self, valuation: Valuation, agent: int):
        return self.base.strategy_of(valuation, agent)

    def unilateral_alternatives(self, valuation: Valuation, agent: int) -> Iterator[Valuation]:
        return self.base.unilateral_alternatives(valuation, agent)

    def costless(self) -> BooleanGame:
        return self.base.costless()

    def utility(self, agent: int, valuation: Valuation) -> Fraction:
        return contract_utility(self.base, self.contract, agent, valuation)


def induced_game(game: BooleanGame, contract: Contract) -> InducedGame:
    validate_contract(game, contract)
    return InducedGame(game, contract)


def validate_contract(game: BooleanGame, contract: Contract) -> Contract:
    if contract.n_agents != game.n_agents:
        raise GameValidationError("contract does not cover every agent")
    if contract.width != len(game.observable):
        raise GameValidationError("contract observation width does not match the game")
    return contract


def build_contract(
    game: BooleanGame,
    defaults: Sequence[Fraction | int] | None = None,
    overrides: Sequence[Mapping[Observation, Fraction | int]] | None = None,
) -> Contract:
    """Normalizing constructor bound to a game's observation space."""
    n = game.n_agents
    default_tuple = tuple(
        Fraction(defaults[i]) if defaults is not None else Fraction(0) for i in range(n)
    )
    override_tuple = tuple(
        {k: Fraction(v) for k, v in (overrides[i] if overrides is not None else {}).items()}
        for i in range(n)
    )
    return validate_contract(
        game, Contract(len(game.observable), default_tuple, override_tuple)
    )


# ---------------------------------------------------------------------------
# Contract file format


def _parse_observation_key(game: BooleanGame, text: str) -> Observation:
    text = text.strip()
    assignment: dict[int, int] = {}
    if text and text != "()":
        for part in text.split(","):
            name, eq, bit = part.partition("=")
            name, bit = name.strip(), bit.strip()
            if not eq or bit not in ("0", "1"):
                raise GameFormatError(f"expected name=bit, found {part.strip()!r}")
            if name not in game.variables:
                raise GameFormatError(f"unknown variable {name!r}")
            index = game.variables.index(name)
            if index not in game.observable:
                raise GameFormatError(f"variable {name} is not observable")
            if index in assignment:
                raise GameFormatError(f"variable {name} assigned twice")
            assignment[index] = int(bit)
    if sorted(assignment) != list(game.observable):
        expected = ", ".join(game.variables[j] for j in game.observable) or "(nothing)"
        raise GameFormatError(f"contract entry must assign exactly: {expected}")
    return tuple(assignment[j] for j in game.observable)


def parse_contract(game: BooleanGame, text: str) -> Contract:
    """Parse the line-oriented contract format against a game."""
    defaults: dict[int, Fraction] = {}
    overrides: list[dict[Observation, Fraction]] = [{} for _ in range(game.n_agents)]

    def parse_agent(token: str, line_no: int) -> int:
        try:
            agent = int(token)
        except ValueError:
            raise GameFormatError(f"expected an agent number, found {token!r}", line_no) from None
        if not 1 <= agent <= game.n_agents:
            raise GameFormatError(f"agent {agent} out of range", line_no)
        return agent - 1

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword == "contractdefault":
            head, _, value = line.partition(":")
            agent = parse_agent(head.split()[1] if len(head.split()) > 1 else "", line_no)
            if agent in defaults:
                raise GameFormatError(f"duplicate contractdefault for agent {agent + 1}", line_no)
            try:
                amount = parse_rational(value)
            except GameFormatError as exc:
                raise GameFormatError(str(exc), line_no) from None
            if amount < 0:
                raise GameFormatError(f"negative payment for agent {agent + 1}", line_no)
            defaults[agent] = amount
        elif keyword == "contract":
            head, _, value = line.partition(":")
            agent = parse_agent(head.split()[1] if len(head.split()) > 1 else "", line_no)
            assignment_text, arrow, amount_text = value.partition("->")
            if not arrow:
                raise GameFormatError("contract line needs '-> <rational>'", line_no)
            try:
                key = _parse_observation_key(game, assignment_text)
                amount = parse_rational(amount_text)
            except GameFormatError as exc:
                raise GameFormatError(str(exc), line_no) from None
            if amount < 0:
                raise GameFormatError(f"negative payment for agent {agent + 1}", line_no)
            if key in overrides[agent]:
                raise GameFormatError(f"duplicate contract entry for agent {agent + 1}", line_no)
            overrides[agent][key] = amount
        else:
            raise GameFormatError(f"unknown directive {keyword!r}", line_no)

    default_tuple = tuple(defaults.get(agent, Fraction(0)) for agent in range(game.n_agents))
    return validate_contract(
        game, Contract(len(game.observable), default_tuple, tuple(overrides))
    )


def parse_payment_fragment(game: BooleanGame, fragment: str) -> tuple[int, Observation, Fraction]:
    """Parse an inline ``"<agent>: <obs assignment> -> <rational>"`` fragment."""
    head, colon, rest = fragment.partition(":")
    if not colon:
        raise GameFormatError(f"payment fragment needs '<agent>: ...', found {fragment!r}")
    try:
        agent = int(head.strip())
    except ValueError:
        raise GameFormatError(f"expected an agent number, found {head.strip()!r}") from None
    if not 1 <= agent <= game.n_agents:
        raise GameFormatError(f"agent {agent} out of range")
    assignment_text, arrow, amount_text = rest.partition("->")
    if not arrow:
        raise GameFormatError("payment fragment needs '-> <rational>'")
    key = _parse_observation_key(game, assignment_text)
    amount = parse_rational(amount_text)
    if amount < 0:
        raise GameFormatError(f"negative payment for agent {agent}")
    return agent - 1, key, amount


def format_contract(game: BooleanGame, contract: Contract) -> str:
    """Canonical contract text; round-trips through parse_contract."""
    lines = []
    for agent in range(contract.n_agents):
        lines.append(f"contractdefault {agent + 1}: {rational_text(contract.defaults[agent])}")
    for agent in range(contract.n_agents):
        for key in sorted(contract.overrides[agent]):
            lines.append(
                f"contract {agent + 1}: {observation_text(game, key)}"
                f" -> {rational_text(contract.overrides[agent][key])}"
            )
    return "\n".join(lines) + "\n"


def contract_json(game: BooleanGame, contract: Contract) -> dict:
    """JSON-friendly mirror of the file format (rationals as strings)."""
    out: dict[str, dict] = {}
    for agent in range(contract.n_agents):
        entry = {
            "default": rational_text(contract.defaults[agent]),
            "overrides": {
                observation_text(game, key): rational_text(amount)
                for key, amount in sorted(contract.overrides[agent].items())
            },
        }
        out[str(agent + 1)] = entry
    return out
