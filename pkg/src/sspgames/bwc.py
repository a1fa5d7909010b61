"""Beyond-worst-case synthesis for the shortest path.

Minimize the expected truncated sum over the strategies that keep it at
most ``worst_bound`` on every run.  An action is safe at ``(s, spent)`` when
every possible successor can still finish within the remaining budget
against an adversary; the per-state adversarial values come from
:func:`sspgames.ssp.solve_worstcase`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .model import MooreStrategy, WeightedMDP
from .payoff import INFINITE, require_positive, target_set
from .percentile import budget_strategy
from .ssp import solve_worstcase


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class BWCResult:
    verdict: Verdict
    expectation: Fraction | None
    strategy: MooreStrategy | None
    worst_case: int | None


def safe_actions(mdp: WeightedMDP, worst: dict, target: frozenset, d: int,
                 worst_bound: int, state, spent: int) -> list:
    allowed = []
    for act in mdp.available(state):
        rest = worst_bound - spent - act.weight[d]
        if all(worst[t] is not INFINITE and worst[t] <= rest for t in act.support()):
            allowed.append(act)
    return allowed


def solve_bwc(mdp: WeightedMDP, target, dimension, worst_bound: int, expectation_bound) -> BWCResult:
    target = target_set(mdp, target)
    d = mdp.dim_index(dimension)
    require_positive(mdp, d, target)
    if isinstance(worst_bound, bool) or int(worst_bound) != worst_bound or worst_bound < 0:
        raise ValueError(f"worst-case bound must be a natural number, got {worst_bound!r}")
    worst_bound = int(worst_bound)
    if worst_bound == 0 and mdp.initial not in target:
        raise ValueError("worst-case bound 0 cannot hold when the initial state is not a target")
    expectation_bound = Fraction(expectation_bound)

    wc = solve_worstcase(mdp, target, d)
    worst = dict(wc.values)
    for t in target:
        worst[t] = 0
    if wc.value is INFINITE or wc.value > worst_bound:
        return BWCResult(Verdict.INFEASIBLE, None, None, None)

    # reachable safe nodes, grouped by spent budget
    start = (mdp.initial, 0)
    layers: dict[int, set] = {0: {start}} if mdp.initial not in target else {}
    allowed: dict = {}
    for spent in range(worst_bound + 1):
        for s, _ in sorted(layers.get(spent, ()), key=lambda n: mdp.states.index(n[0])):
            acts = safe_actions(mdp, worst, target, d, worst_bound, s, spent)
            assert acts, "a reachable safe node always keeps a safe action"
            allowed[(s, spent)] = acts
            for act in acts:
                nxt = spent + act.weight[d]
                for t in act.support():
                    if t not in target:
                        layers.setdefault(nxt, set()).add((t, nxt))

    expect: dict = {}
    longest: dict = {}
    policy: dict = {}
    for node in sorted(allowed, key=lambda n: -n[1]):
        s, spent = node
        best = None
        for act in allowed[node]:  # sorted by name: ties keep the lowest
            nxt = spent + act.weight[d]
            q = act.weight[d] + sum(
                (p * (0 if t in target else expect[(t, nxt)]) for t, p in act.dist), Fraction(0))
            if best is None or q < best[0]:
                best = (q, act)
        q, act = best
        expect[node] = q
        policy[node] = act.name
        nxt = spent + act.weight[d]
        longest[node] = act.weight[d] + max(
            0 if t in target else longest[(t, nxt)] for t in act.support())

    if mdp.initial in target:
        value, certified = Fraction(0), 0
    else:
        value, certified = expect[start], longest[start]
    strategy = budget_strategy(mdp, policy, target, d, worst_bound)
    verdict = Verdict.YES if value <= expectation_bound else Verdict.NO
    return BWCResult(verdict, value, strategy, certified)
