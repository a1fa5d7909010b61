"""Single percentile queries: maximize ``P[TS <= bound]``.

The MDP is unfolded over the budget already spent.  Strictly positive
weights make the unfolding a DAG ordered by spent budget, so one backward
sweep yields the optimum and an optimal pure strategy whose memory is the
spent budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import MooreStrategy, State, WeightedMDP, first_action_fallback
from .payoff import check_probability, require_positive, target_set

DONE = "done"


def node_memory(state: State, spent: int) -> str:
    return f"{state}|{spent}"


@dataclass(frozen=True)
class PercentileResult:
    verdict: bool
    probability: Fraction
    strategy: MooreStrategy


def budget_strategy(mdp: WeightedMDP, policy: dict, target: frozenset, d: int,
                    bound: int) -> MooreStrategy:
    """Moore machine for a policy on ``(state, spent)`` nodes.

    Only nodes reachable under ``policy`` get a memory state.  Reaching the
    target or exceeding ``bound`` moves to a sink memory that plays the
    lowest-named action everywhere.
    """
    start = (mdp.initial, 0)
    choice, update = {}, {}
    memory = [DONE]
    fallback = first_action_fallback(mdp)
    for s in mdp.states:
        choice[(DONE, s)] = ((fallback[s], Fraction(1)),)
    update[(DONE, "*")] = DONE
    if mdp.initial in target:
        init = DONE
    else:
        init = node_memory(*start)
        stack, seen = [start], {start}
        while stack:
            s, spent = stack.pop()
            m = node_memory(s, spent)
            memory.append(m)
            act = mdp.action(s, policy[(s, spent)])
            choice[(m, s)] = ((act.name, Fraction(1)),)
            nxt = spent + act.weight[d]
            for t in act.support():
                if t in target or nxt > bound:
                    update[(m, t)] = DONE
                    continue
                update[(m, t)] = node_memory(t, nxt)
                if (t, nxt) not in seen:
                    seen.add((t, nxt))
                    stack.append((t, nxt))
    return MooreStrategy(tuple(memory), init, choice, update)


def solve_percentile(mdp: WeightedMDP, target, dimension, bound: int, alpha) -> PercentileResult:
    """Maximal probability of reaching ``target`` with truncated sum at most
    ``bound``; the verdict tells whether it reaches ``alpha``."""
    target = target_set(mdp, target)
    d = mdp.dim_index(dimension)
    require_positive(mdp, d, target)
    alpha = check_probability(alpha)
    if isinstance(bound, bool) or int(bound) != bound or bound < 0:
        raise ValueError(f"bound must be a natural number, got {bound!r}")
    bound = int(bound)

    # value[spent][state], filled from the largest budget downwards
    value: list[dict] = [{}] * (bound + 1)
    policy: dict = {}
    for spent in range(bound, -1, -1):
        row = {}
        for s in mdp.states:
            if s in target:
                row[s] = Fraction(1)
                continue
            best, best_name = None, None
            for act in mdp.available(s):  # sorted: ties keep the lowest name
                nxt = spent + act.weight[d]
                if nxt > bound:
                    q = Fraction(0)
                else:
                    q = sum((p * value[nxt][t] for t, p in act.dist), Fraction(0))
                if best is None or q > best:
                    best, best_name = q, act.name
            row[s] = best
            policy[(s, spent)] = best_name
        value[spent] = row

    prob = value[0][mdp.initial]
    strategy = budget_strategy(mdp, policy, target, d, bound)
    return PercentileResult(prob >= alpha, prob, strategy)
