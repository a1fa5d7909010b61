"""Shortest-path planning in weighted MDPs and weighted two-player games."""

from .bwc import BWCResult, Verdict, solve_bwc
from .chain import (InducedChain, expected_truncated_sum, induce_chain, prob_ts_leq,
                    reach_probability, worst_truncated_sum)
from .formats import fixture_path, parse_model, parse_query, parse_strategy
from .model import (IncompleteStrategyError, ModelError, MooreStrategy, WeightedGame,
                    WeightedMDP, strategy_step, validate_game, validate_mdp)
from .multi import PercentileConstraint, solve_multi_percentile
from .payoff import INFINITE, TruncatedSumSpec
from .percentile import solve_percentile
from .sim import SimConfig, SimReport, simulate
from .ssp import solve_expectation, solve_worstcase
from .verifier import (MeanPayoffSpec, ObjectiveSpec, build_product, check_buchi, check_energy,
                       check_meanpayoff, verify)

__all__ = [
    "BWCResult", "INFINITE", "IncompleteStrategyError", "InducedChain", "MeanPayoffSpec",
    "ModelError", "MooreStrategy", "ObjectiveSpec", "PercentileConstraint", "SimConfig",
    "SimReport", "TruncatedSumSpec", "Verdict", "WeightedGame", "WeightedMDP", "build_product",
    "check_buchi", "check_energy", "check_meanpayoff", "expected_truncated_sum", "fixture_path",
    "induce_chain", "parse_model", "parse_query", "parse_strategy", "prob_ts_leq",
    "reach_probability", "simulate", "solve_bwc", "solve_expectation", "solve_multi_percentile",
    "solve_percentile", "solve_worstcase", "strategy_step", "validate_game", "validate_mdp",
    "verify", "worst_truncated_sum",
]
