from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_expectation, brute_worstcase, random_mdp, seeded
from sspgames.chain import expected_truncated_sum, induce_chain, worst_truncated_sum
from sspgames.model import MooreStrategy, validate_game, validate_mdp
from sspgames.payoff import INFINITE, TruncatedSumSpec
from sspgames.ssp import (adversarial_view, almost_sure_states, follow_path, solve_expectation,
                          solve_worstcase)

WORK = frozenset({"work"})


def test_expectation_commuting(commuting):
    res = solve_expectation(commuting, ["work"], "time")
    assert res.value == 33
    assert res.strategy.as_memoryless_map()["home"] == "car"
    assert res.decide(33) and not res.decide(32)


def test_worstcase_commuting(commuting):
    res = solve_worstcase(commuting, ["work"], "time")
    assert res.value == 45
    assert res.strategy.as_memoryless_map()["home"] == "bike"
    assert res.values["heavy-traffic"] == 70


def test_car_worst_case_is_71(commuting, strategy):
    chain = induce_chain(commuting, strategy("car"), absorbing=WORK)
    assert worst_truncated_sum(chain, WORK, 0) == 71


def test_deterministic_shortest_path(shortest_path):
    res = solve_worstcase(shortest_path, ["D"], "time")
    assert res.value == 30
    assert follow_path(shortest_path, res.strategy)[:5] == ["A", "C", "E", "B", "D"]


def test_shortest_path_game_with_adversary():
    g = validate_game({"type": "game", "dimensions": 1, "states": ["a", "b", "t"], "initial": "a",
                       "players": {"1": ["a", "t"], "2": ["b"]},
                       "edges": [{"source": "a", "target": "b", "weight": [1]},
                                 {"source": "a", "target": "t", "weight": [10]},
                                 {"source": "b", "target": "t", "weight": [2]},
                                 {"source": "b", "target": "a", "weight": [1]},
                                 {"source": "t", "target": "t", "weight": [1]}]})
    # the adversary could bounce a<->b forever, so player 1 goes straight
    assert solve_worstcase(g, ["t"], 0).value == 10


def test_almost_sure_states():
    mdp = validate_mdp({"type": "mdp", "dimensions": 1, "states": ["a", "b", "t", "x"], "initial": "a",
                        "actions": [
                            {"name": "risky", "source": "a", "weight": [1], "dist": {"t": "1/2", "x": "1/2"}},
                            {"name": "safe", "source": "a", "weight": [5], "dist": {"b": 1}},
                            {"name": "go", "source": "b", "weight": [1], "dist": {"t": "1/2", "b": "1/2"}},
                            {"name": "s", "source": "t", "weight": [1], "dist": {"t": 1}},
                            {"name": "s", "source": "x", "weight": [1], "dist": {"x": 1}}]})
    good, policy = almost_sure_states(mdp, frozenset({"t"}))
    assert good == {"a", "b", "t"} and policy == {"a": "safe", "b": "go"}
    res = solve_expectation(mdp, ["t"], 0)
    assert res.value == 7 and res.values["x"] is INFINITE


def test_unreachable_target_is_infinite():
    mdp = validate_mdp({"type": "mdp", "dimensions": 1, "states": ["a", "t"], "initial": "a",
                        "actions": [{"name": "s", "source": "a", "weight": [1], "dist": {"a": 1}},
                                    {"name": "s", "source": "t", "weight": [1], "dist": {"t": 1}}]})
    assert solve_expectation(mdp, ["t"], 0).value is INFINITE
    assert solve_worstcase(mdp, ["t"], 0).value is INFINITE


def test_adversarial_view_shape(commuting):
    g = adversarial_view(commuting)
    assert g.owner("home") == 1 and g.owner(("home", "car")) == 2
    assert {e.target for e in g.outgoing(("home", "car"))} == {
        "light-traffic", "medium-traffic", "heavy-traffic"}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_brute_force_small(seed, n):
    rng = seeded(seed)
    mdp = random_mdp(rng, n + 1 if n == 1 else n)
    target = frozenset({mdp.states[-1]})
    exp = solve_expectation(mdp, target, 0)
    wc = solve_worstcase(mdp, target, 0)
    assert exp.value == brute_expectation(mdp, target)
    assert wc.value == brute_worstcase(mdp, target)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 6))
def test_strategies_reproduce_values(seed, n):
    mdp = random_mdp(seeded(seed), n)
    target = frozenset({mdp.states[-1]})
    exp = solve_expectation(mdp, target, 0)
    chain = induce_chain(mdp, exp.strategy, absorbing=target)
    assert expected_truncated_sum(chain, TruncatedSumSpec(target, 0)) == exp.value
    wc = solve_worstcase(mdp, target, 0)
    chain = induce_chain(mdp, wc.strategy, absorbing=target)
    assert worst_truncated_sum(chain, target, 0) == wc.value
    if wc.value is not INFINITE:
        assert exp.value <= wc.value


def test_degenerate_model():
    mdp = validate_mdp({"type": "mdp", "dimensions": 1, "states": ["s"], "initial": "s",
                        "actions": [{"name": "a", "source": "s", "weight": [1], "dist": {"s": 1}}]})
    assert solve_expectation(mdp, ["s"], 0).value == 0
    assert solve_worstcase(mdp, ["s"], 0).value == 0
    assert solve_expectation(mdp, ["s"], 0).strategy.as_memoryless_map() == {"s": "a"}
