"""Command-line interface.

Commands: classify, verify, contract, induce, eliminate, graph,
reduce-qsat3. Exit codes: 0 for yes/success, 1 for a no answer, 2 for input
errors, 3 when a search cap is exceeded. JSON is the machine format; the
text renderer is derived from the same data.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .contracts import (
    Contract,
    contract_json,
    format_contract,
    induced_game,
    parse_contract,
    parse_payment_fragment,
    build_contract,
)
from .deviations import (
    contract_deviation_graph,
    find_single_agent_observed_cycle,
    graph_to_dot,
    hard_equilibria,
    inducible_equilibria,
    potential_deviation_graph,
    soft_equilibria,
)
from .equilibria import (
    consistent_equilibria,
    decide_a_verifiability,
    decide_e_verifiability,
    initial_equilibria,
    nash_equilibria,
)
from .formula import FormulaError, evaluate, parse_formula, print_formula
from .game import (
    BooleanGame,
    GameFormatError,
    GameValidationError,
    format_game,
    load_game,
    observation_text,
    parse_observation,
    parse_valuation,
    valuation_text,
)
from .qsat import Qsat3Instance, brute_force_qsat3, reduce_qsat3
from .synthesis import (
    CertificateError,
    SearchCapExceeded,
    SynthesisCertificate,
    decide_a_contractibility,
    decide_e_contractibility,
    eliminate_contract,
    induce_contract,
)

EXIT_YES = 0
EXIT_NO = 1
EXIT_INPUT = 2
EXIT_CAP = 3


class _InputError(Exception):
    pass


def _load(path: str) -> BooleanGame:
    try:
        return load_game(path)
    except FileNotFoundError:
        raise _InputError(f"no such file: {path}") from None
    except (GameFormatError, GameValidationError, FormulaError) as exc:
        raise _InputError(f"{path}: {exc}") from None


def _objective(game: BooleanGame, text: Optional[str]):
    if text is None:
        raise _InputError("an --objective formula is required")
    try:
        return parse_formula(text, game.variables)
    except FormulaError as exc:
        raise _InputError(f"objective: {exc}") from None


def _gather_contract(game: BooleanGame, args) -> Optional[Contract]:
    """Combine a --contract file and inline --pay fragments, if any."""
    contract_path = getattr(args, "contract", None)
    fragments = getattr(args, "pay", None) or []
    if contract_path is None and not fragments:
        return None
    if contract_path is not None:
        try:
            with open(contract_path, "r", encoding="utf-8") as handle:
                contract = parse_contract(game, handle.read())
        except FileNotFoundError:
            raise _InputError(f"no such file: {contract_path}") from None
        except (GameFormatError, GameValidationError) as exc:
            raise _InputError(f"{contract_path}: {exc}") from None
    else:
        contract = build_contract(game)
    if fragments:
        overrides = [dict(table) for table in contract.overrides]
        for fragment in fragments:
            try:
                agent, key, amount = parse_payment_fragment(game, fragment)
            except GameFormatError as exc:
                raise _InputError(f"--pay {fragment!r}: {exc}") from None
            overrides[agent][key] = amount
        contract = build_contract(game, defaults=contract.defaults, overrides=overrides)
    return contract


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _write_output(args, content: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(content)


def _contract_selfcheck(game: BooleanGame, contract: Contract, path: str) -> None:
    """Re-load an emitted contract file and insist it matches what was meant."""
    with open(path, "r", encoding="utf-8") as handle:
        reloaded = parse_contract(game, handle.read())
    for agent in range(game.n_agents):
        for observation in game.observations():
            if reloaded.payment(agent, observation) != contract.payment(agent, observation):
                raise CertificateError(f"contract file {path} does not round-trip")


def _certificate_payload(game: BooleanGame, certificate: SynthesisCertificate, problem: str, objective_text: str) -> dict:
    return {
        "problem": problem,
        "answer": certificate.answer,
        "objective": objective_text,
        "witness": (
            valuation_text(game, certificate.witness_profile)
            if certificate.witness_profile is not None
            else None
        ),
        "eliminated": [valuation_text(game, v) for v in certificate.eliminated],
        "contract": (
            contract_json(game, certificate.contract) if certificate.contract is not None else None
        ),
        "verified": certificate.verified,
    }


def _certificate_lines(game: BooleanGame, certificate: SynthesisCertificate, problem: str) -> list[str]:
    lines = [f"problem: {problem}", f"answer: {'yes' if certificate.answer else 'no'}"]
    if certificate.witness_profile is not None:
        lines.append(f"witness: {valuation_text(game, certificate.witness_profile)}")
    if certificate.eliminated:
        lines.append(
            "eliminated: " + " | ".join(valuation_text(game, v) for v in certificate.eliminated)
        )
    if certificate.contract is not None:
        lines.append("contract:")
        lines.extend("  " + line for line in format_contract(game, certificate.contract).splitlines())
        lines.append(f"verified: {'yes' if certificate.verified else 'no'}")
    return lines


def _finish_certificate(args, game: BooleanGame, certificate: SynthesisCertificate, problem: str, objective_text: str) -> int:
    payload = _certificate_payload(game, certificate, problem, objective_text)
    _emit(args, payload, _certificate_lines(game, certificate, problem))
    if certificate.contract is not None and args.out:
        _write_output(args, format_contract(game, certificate.contract))
        _contract_selfcheck(game, certificate.contract, args.out)
    return EXIT_YES if certificate.answer else EXIT_NO


# ---------------------------------------------------------------------------
# Commands


def cmd_classify(args) -> int:
    game = _load(args.game)
    contract = _gather_contract(game, args)
    subject = induced_game(game, contract) if contract is not None else game
    objective = None
    if args.objective is not None:
        objective = _objective(game, args.objective)
    ne = set(nash_equilibria(subject))
    init = set(initial_equilibria(subject))
    inducible = set(inducible_equilibria(subject))
    hard = set(hard_equilibria(subject))
    soft = set(soft_equilibria(subject))

    rows = []
    for v in game.profiles():
        rows.append(
            {
                "valuation": valuation_text(game, v),
                "observation": observation_text(game, game.observation(v)),
                "ne": v in ne,
                "objective": (evaluate(objective, v) if objective is not None else None),
                "winners": sorted(agent + 1 for agent in game.winners(v)),
            }
        )

    def render_set(profiles) -> str:
        ordered = sorted(profiles)
        if not ordered:
            return "(none)"
        return " | ".join(valuation_text(game, v) for v in ordered)

    payload = {
        "game": args.game,
        "objective": print_formula(objective) if objective is not None else None,
        "rows": rows,
        "ne": [valuation_text(game, v) for v in sorted(ne)],
        "init": [valuation_text(game, v) for v in sorted(init)],
        "inducible": [valuation_text(game, v) for v in sorted(inducible)],
        "hard": [valuation_text(game, v) for v in sorted(hard)],
        "soft": [valuation_text(game, v) for v in sorted(soft)],
    }

    width = max(len(row["valuation"]) for row in rows)
    obs_width = max(len("obs"), max(len(row["observation"]) for row in rows))
    lines = [
        f"game: {args.game}",
        "objective: " + (print_formula(objective) if objective is not None else "(none)"),
        "",
        f"{'valuation'.ljust(width)}  {'obs'.ljust(obs_width)}  ne   phi  winners",
    ]
    for row in rows:
        phi = "-" if row["objective"] is None else ("yes" if row["objective"] else "no")
        ne_text = "yes" if row["ne"] else "no"
        winners = ",".join(str(w) for w in row["winners"]) or "-"
        lines.append(
            f"{row['valuation'].ljust(width)}  {row['observation'].ljust(obs_width)}"
            f"  {ne_text.ljust(3)}  {phi.ljust(3)}  {winners}"
        )
    lines.extend(
        [
            "",
            f"ne:        {render_set(ne)}",
            f"init:      {render_set(init)}",
            f"inducible: {render_set(inducible)}",
            f"hard:      {render_set(hard)}",
            f"soft:      {render_set(soft)}",
        ]
    )
    _emit(args, payload, lines)
    return EXIT_YES


def cmd_verify(args) -> int:
    game = _load(args.game)
    contract = _gather_contract(game, args)
    subject = induced_game(game, contract) if contract is not None else game
    objective = _objective(game, args.objective)
    try:
        observation = parse_observation(game, args.obs if args.obs is not None else "")
    except GameFormatError as exc:
        raise _InputError(str(exc)) from None
    if args.mode == "e":
        answer, witness = decide_e_verifiability(subject, observation, objective)
        problem = "e-nash-verifiability"
    else:
        answer, witness = decide_a_verifiability(subject, observation, objective)
        problem = "a-nash-verifiability"
    consistent = consistent_equilibria(subject, observation)
    payload = {
        "problem": problem,
        "answer": answer,
        "witness": valuation_text(game, witness) if witness is not None else None,
        "equilibria": [valuation_text(game, v) for v in consistent],
        "objective": print_formula(objective),
        "observation": observation_text(game, observation),
    }
    label = "witness" if args.mode == "e" else "counterexample"
    lines = [
        f"problem: {problem}",
        f"observation: {observation_text(game, observation)}",
        f"objective: {print_formula(objective)}",
        f"answer: {'yes' if answer else 'no'}",
    ]
    if witness is not None:
        lines.append(f"{label}: {valuation_text(game, witness)}")
    lines.append(
        "consistent equilibria: "
        + (" | ".join(valuation_text(game, v) for v in consistent) or "(none)")
    )
    _emit(args, payload, lines)
    return EXIT_YES if answer else EXIT_NO


def cmd_contract(args) -> int:
    game = _load(args.game)
    objective = _objective(game, args.objective)
    if args.mode == "e":
        certificate = decide_e_contractibility(game, objective)
        problem = "e-nash-contractibility"
    else:
        certificate = decide_a_contractibility(game, objective, max_systems=args.max_systems)
        problem = "a-nash-contractibility"
    return _finish_certificate(args, game, certificate, problem, print_formula(objective))


def cmd_induce(args) -> int:
    game = _load(args.game)
    try:
        profile = parse_valuation(game, args.profile)
    except GameFormatError as exc:
        raise _InputError(str(exc)) from None
    contract = induce_contract(game, profile)
    certificate = SynthesisCertificate(
        answer=contract is not None,
        contract=contract,
        witness_profile=profile if contract is not None else None,
        eliminated=(),
        verified=contract is not None,
    )
    return _finish_certificate(args, game, certificate, "induce", valuation_text(game, profile))


def cmd_eliminate(args) -> int:
    game = _load(args.game)
    try:
        targets = [parse_valuation(game, text) for text in args.profile]
    except GameFormatError as exc:
        raise _InputError(str(exc)) from None
    init = set(initial_equilibria(game))
    outside = [v for v in targets if v not in init]
    if outside:
        raise _InputError(
            "not initial equilibria: " + " | ".join(valuation_text(game, v) for v in outside)
        )
    contract = eliminate_contract(game, targets, max_choices=args.max_systems)
    certificate = SynthesisCertificate(
        answer=contract is not None,
        contract=contract,
        witness_profile=None,
        eliminated=tuple(sorted(set(targets))) if contract is not None else (),
        verified=contract is not None,
    )
    return _finish_certificate(
        args, game, certificate, "eliminate", " | ".join(sorted(args.profile))
    )


def cmd_graph(args) -> int:
    game = _load(args.game)
    contract = _gather_contract(game, args)
    if contract is not None:
        graph = contract_deviation_graph(induced_game(game, contract))
    else:
        graph = potential_deviation_graph(game)
    cycle = find_single_agent_observed_cycle(game, graph)
    dot = graph_to_dot(game, graph, highlight=cycle)
    if args.format == "json":
        payload = {
            "vertices": [valuation_text(game, v) for v in graph.vertices],
            "edges": [
                {
                    "from": valuation_text(game, source),
                    "to": valuation_text(game, target),
                    "agent": agent + 1,
                }
                for source, target, agent in graph.edges()
            ],
            "cycle": (
                {
                    "observations": [observation_text(game, o) for o in cycle.observations],
                    "witnesses": [valuation_text(game, v) for v in cycle.witness_profiles],
                    "agents": [agent + 1 for agent in cycle.agents],
                }
                if cycle is not None
                else None
            ),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(dot, end="")
    _write_output(args, dot)
    return EXIT_YES


def cmd_reduce_qsat3(args) -> int:
    names = tuple(args.exists) + tuple(args.forall) + tuple(args.exists2)
    try:
        matrix = parse_formula(args.matrix, names)
        instance = Qsat3Instance(
            variables=names,
            exists_first=tuple(args.exists),
            forall=tuple(args.forall),
            exists_second=tuple(args.exists2),
            matrix=matrix,
        )
    except (FormulaError, ValueError) as exc:
        raise _InputError(str(exc)) from None
    game, objective = reduce_qsat3(instance)
    game_text = format_game(game)
    _write_output(args, game_text)
    payload = {
        "objective": print_formula(objective),
        "game": game_text,
    }
    lines = [f"objective: {print_formula(objective)}", "game:"] + [
        "  " + line for line in game_text.splitlines()
    ]
    if args.check:
        direct = brute_force_qsat3(instance)
        certificate = decide_a_contractibility(game, objective, max_systems=args.max_systems)
        payload["qsat3"] = direct
        payload["a_nash_contractibility"] = certificate.answer
        payload["agree"] = direct == certificate.answer
        lines.append(f"qsat3: {'yes' if direct else 'no'}")
        lines.append(f"a-nash-contractibility: {'yes' if certificate.answer else 'no'}")
        lines.append(f"agree: {'yes' if direct == certificate.answer else 'no'}")
        _emit(args, payload, lines)
        return EXIT_YES if direct == certificate.answer else EXIT_NO
    _emit(args, payload, lines)
    return EXIT_YES


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contractgames",
        description="Analyze Boolean games with costs under a partially observing principal.",
    )
    parser.add_argument("--format", choices=("text", "json", "dot"), default="text")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
    parser.add_argument(
        "--max-systems", type=int, default=10**6, help="cap on feasibility systems searched"
    )
    parser.add_argument("--out", help="write the produced artifact (contract, game, dot) here")
    commands = parser.add_subparsers(dest="command", required=True)

    def contract_inputs(sub) -> None:
        sub.add_argument("--contract", help="analyze the game induced by this contract file")
        sub.add_argument(
            "--pay",
            action="append",
            help="inline payment fragment '<agent>: <obs assignment> -> <rational>' (repeatable)",
        )

    classify = commands.add_parser("classify", help="table of profiles plus equilibrium sets")
    classify.add_argument("game")
    classify.add_argument("--objective")
    contract_inputs(classify)
    classify.set_defaults(func=cmd_classify)

    verify = commands.add_parser("verify", help="decide verifiability for an observation")
    verify.add_argument("game")
    verify.add_argument("-m", "--mode", choices=("e", "a"), required=True)
    verify.add_argument("--obs", help="observation as name=bit list (omit when nothing is observable)")
    verify.add_argument("--objective", required=True)
    contract_inputs(verify)
    verify.set_defaults(func=cmd_verify)

    contract = commands.add_parser("contract", help="decide contractibility and emit a contract")
    contract.add_argument("game")
    contract.add_argument("-m", "--mode", choices=("e", "a"), required=True)
    contract.add_argument("--objective", required=True)
    contract.set_defaults(func=cmd_contract)

    induce = commands.add_parser("induce", help="contract making one profile an equilibrium")
    induce.add_argument("game")
    induce.add_argument("--profile", required=True, help="full name=bit valuation")
    induce.set_defaults(func=cmd_induce)

    eliminate = commands.add_parser("eliminate", help="contract removing the given equilibria")
    eliminate.add_argument("game")
    eliminate.add_argument(
        "--profile", action="append", required=True, help="repeatable full name=bit valuation"
    )
    eliminate.set_defaults(func=cmd_eliminate)

    graph = commands.add_parser("graph", help="export the potential deviation graph")
    graph.add_argument("game")
    contract_inputs(graph)
    graph.set_defaults(func=cmd_graph)

    reduce_cmd = commands.add_parser("reduce-qsat3", help="build the contract-design game of a QSAT3 instance")
    reduce_cmd.add_argument("--exists", nargs="+", required=True)
    reduce_cmd.add_argument("--forall", nargs="+", required=True)
    reduce_cmd.add_argument("--exists2", nargs="+", required=True)
    reduce_cmd.add_argument("--matrix", required=True)
    reduce_cmd.add_argument("--check", action="store_true")
    reduce_cmd.set_defaults(func=cmd_reduce_qsat3)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GameFormatError, GameValidationError, FormulaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SearchCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    raise SystemExit(main())
