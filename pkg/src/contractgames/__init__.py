"""Boolean games with costs under a partially observing principal:
equilibrium analysis, verifiability, and contract synthesis."""

from .contracts import (
    Contract,
    InducedGame,
    build_contract,
    contract_utility,
    format_contract,
    induced_game,
    null_contract,
    parse_contract,
    validate_contract,
)
from .deviations import (
    DeviationGraph,
    DeviationKind,
    ObservedPath,
    contract_deviation_graph,
    find_single_agent_observed_cycle,
    graph_to_dot,
    hard_equilibria,
    inducible_equilibria,
    is_hard_deviation,
    is_inducible_deviation,
    is_initial_deviation,
    is_soft_deviation,
    potential_deviation_graph,
    soft_equilibria,
)
from .equilibria import (
    beneficial_deviation,
    consistent_equilibria,
    decide_a_verifiability,
    decide_e_verifiability,
    env,
    initial_equilibria,
    nash_equilibria,
    ne_satisfying,
)
from .feasibility import LinearConstraint, fm_feasible
from .formula import Formula, parse_formula, print_formula
from .formula import evaluate as evaluate_formula
from .game import (
    BooleanGame,
    CostTable,
    build_game,
    format_game,
    load_game,
    parse_game,
    restrict,
)
from .qsat import Qsat3Instance, brute_force_qsat3, cross_check, reduce_qsat3
from .synthesis import (
    SynthesisCertificate,
    decide_a_contractibility,
    decide_e_contractibility,
    eliminate_contract,
    induce_contract,
)

__version__ = "0.1.0"
