from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_mdp, seeded
from sspgames.chain import induce_chain, prob_ts_leq
from sspgames.multi import FAIL, SAT, PercentileConstraint, build_unfolding, solve_multi_percentile
from sspgames.payoff import TruncatedSumSpec
from sspgames.percentile import solve_percentile

WORK = frozenset({"work"})


def constraints(mdp, a1="8/10", a2="1/2"):
    return [PercentileConstraint.of(mdp, ["work"], "time", 40, Fraction(a1)),
            PercentileConstraint.of(mdp, ["work"], "cost", 10, Fraction(a2))]


def achieved(mdp, strategy, cons):
    stop = frozenset.intersection(*(c.target for c in cons))
    chain = induce_chain(mdp, strategy, absorbing=stop)
    return tuple(prob_ts_leq(chain, TruncatedSumSpec(c.target, c.dimension, c.bound)) for c in cons)


def test_fixture_strategies(bus_taxi, strategy):
    cons = constraints(bus_taxi)
    assert achieved(bus_taxi, strategy("bus-once-then-taxi"), cons) == (Fraction(997, 1000), Fraction(7, 10))
    c1, c2 = achieved(bus_taxi, strategy("coin"), cons)
    assert c1 == Fraction(11091, 12500) and c1 >= Fraction(816, 1000)
    assert c2 == Fraction(509208, 1000000)


def test_solver_yes(bus_taxi):
    cons = constraints(bus_taxi)
    res = solve_multi_percentile(bus_taxi, cons)
    assert res.verdict
    assert all(a >= c.alpha for a, c in zip(res.achieved, cons))
    assert achieved(bus_taxi, res.strategy, cons) == res.achieved


def test_single_constraints_match_percentile(bus_taxi):
    c1 = solve_percentile(bus_taxi, ["work"], "time", 40, 0).probability
    c2 = solve_percentile(bus_taxi, ["work"], "cost", 10, 0).probability
    assert c1 == Fraction(997, 1000)
    # up to three bus rides stay within 10 dollars
    assert c2 == 1 - Fraction(3, 10) ** 3


def test_solver_no(bus_taxi):
    # 7/10 on cost forces the bus first; taxi after it is the best for time
    assert solve_multi_percentile(bus_taxi, constraints(bus_taxi, "997/1000", "7/10")).verdict
    assert not solve_multi_percentile(bus_taxi, constraints(bus_taxi, "998/1000", "7/10")).verdict
    assert not solve_multi_percentile(bus_taxi, constraints(bus_taxi, "997/1000", "71/100")).verdict
    # a second bus ride now and then trades time for cost
    assert solve_multi_percentile(bus_taxi, constraints(bus_taxi, "8/10", "71/100")).verdict


def test_emitted_strategy_reproduces(bus_taxi):
    cons = constraints(bus_taxi, "9/10", "6/10")
    res = solve_multi_percentile(bus_taxi, cons)
    assert res.verdict
    assert achieved(bus_taxi, res.strategy, cons) == res.achieved


def test_unfolding_statuses(bus_taxi):
    unf = build_unfolding(bus_taxi, constraints(bus_taxi))
    assert unf.nodes[0] == ("home", (0, 0))
    terminal = {unf.status(i) for i, t in enumerate(unf.terminal) if t}
    assert (SAT, SAT) in terminal and (SAT, FAIL) in terminal and (FAIL, FAIL) in terminal


def test_empty_constraints(bus_taxi):
    with pytest.raises(ValueError):
        solve_multi_percentile(bus_taxi, [])


def test_initial_already_resolved(bus_taxi):
    c = PercentileConstraint.of(bus_taxi, ["home"], "time", 0, 1)
    res = solve_multi_percentile(bus_taxi, [c])
    assert res.verdict and res.achieved == (1,)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 7), st.integers(1, 7))
def test_random_two_dimensional(seed, n, l1, l2):
    rng = seeded(seed)
    mdp = random_mdp(rng, n, max_weight=3, dims=2)
    target = [mdp.states[-1]]
    p1 = solve_percentile(mdp, target, 0, l1, 0).probability
    p2 = solve_percentile(mdp, target, 1, l2, 0).probability
    a1, a2 = p1 * Fraction(rng.randint(0, 10), 10), p2 * Fraction(rng.randint(0, 10), 10)
    cons = [PercentileConstraint.of(mdp, target, 0, l1, a1),
            PercentileConstraint.of(mdp, target, 1, l2, a2)]
    res = solve_multi_percentile(mdp, cons)
    if res.verdict:
        got = achieved(mdp, res.strategy, cons)
        assert got == res.achieved
        assert got[0] >= a1 and got[1] >= a2
    # a single constraint is feasible exactly up to its own optimum
    assert solve_multi_percentile(mdp, cons[:1]).verdict == (a1 <= p1)
