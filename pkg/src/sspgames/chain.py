"""Markov chains induced by fixing a finite-memory strategy in an MDP.

All quantities are exact: reachability and expectations come from a
rational linear solve, threshold probabilities from a budget table.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import linalg
from .model import IncompleteStrategyError, MooreStrategy, State, WeightedMDP
from .payoff import INFINITE, TruncatedSumSpec, require_positive

ONE = Fraction(1)


@dataclass(frozen=True)
class ChainEdge:
    prob: Fraction
    action: str | None  # None on the self-loop of a node made absorbing
    weight: tuple[int, ...]
    target: int


@dataclass(frozen=True, eq=False)
class InducedChain:
    mdp: WeightedMDP
    nodes: tuple[tuple[State, str], ...]  # (model state, memory); node 0 is initial
    edges: tuple[tuple[ChainEdge, ...], ...]

    initial = 0

    def __len__(self):
        return len(self.nodes)

    def state(self, i: int) -> State:
        return self.nodes[i][0]

    def distribution(self, i: int) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for e in self.edges[i]:
            out[e.target] = out.get(e.target, 0) + e.prob
        return out

    def target_nodes(self, target: Iterable[State]) -> set[int]:
        target = set(target)
        return {i for i, (s, _) in enumerate(self.nodes) if s in target}


def induce_chain(mdp: WeightedMDP, strategy: MooreStrategy,
                 absorbing: Iterable[State] | None = None) -> InducedChain:
    """Product of ``mdp`` and ``strategy`` restricted to reachable pairs.

    States in ``absorbing`` are not expanded: their nodes get a zero-weight
    self-loop.  Queries that stop at the first visit of a target contained
    in ``absorbing`` are unaffected, and the strategy need not be defined
    beyond those states.
    """
    stop = frozenset(absorbing or ())
    zero = (0,) * mdp.dimensions
    start = (mdp.initial, strategy.initial_memory)
    index = {start: 0}
    nodes = [start]
    edges: list[tuple[ChainEdge, ...]] = []
    queue = deque([start])
    while queue:
        s, m = queue.popleft()
        i = index[(s, m)]
        if s in stop:
            edges.append((ChainEdge(ONE, None, zero, i),))
            continue
        out = []
        for a_name, p in strategy.distribution(m, s):
            if not mdp.has_action(s, a_name):
                raise IncompleteStrategyError(
                    f"strategy picks {a_name!r} at {s!r}, which is not available there")
            act = mdp.action(s, a_name)
            for succ, q in act.dist:
                node = (succ, strategy.next_memory(m, succ, a_name))
                j = index.get(node)
                if j is None:
                    j = index[node] = len(nodes)
                    nodes.append(node)
                    queue.append(node)
                out.append(ChainEdge(p * q, a_name, act.weight, j))
        edges.append(tuple(out))
    return InducedChain(mdp, tuple(nodes), tuple(edges))


def _can_reach(chain: InducedChain, goal: set[int]) -> set[int]:
    preds: list[list[int]] = [[] for _ in chain.nodes]
    for i, out in enumerate(chain.edges):
        for e in out:
            preds[e.target].append(i)
    seen = set(goal)
    stack = list(goal)
    while stack:
        v = stack.pop()
        for u in preds[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def _reachable_avoiding(chain: InducedChain, goal: set[int]) -> list[int]:
    """Nodes reachable from the initial node without passing through ``goal``."""
    seen = {chain.initial}
    order = [chain.initial]
    k = 0
    while k < len(order):
        v = order[k]
        k += 1
        if v in goal:
            continue
        for e in chain.edges[v]:
            if e.target not in seen:
                seen.add(e.target)
                order.append(e.target)
    return order


def reach_probability(chain: InducedChain, target: Iterable[State]) -> Fraction:
    """Exact probability that a run visits ``target``."""
    goal = chain.target_nodes(target)
    if chain.initial in goal:
        return ONE
    live = _can_reach(chain, goal)
    if chain.initial not in live:
        return Fraction(0)
    unknown = [v for v in _reachable_avoiding(chain, goal) if v not in goal and v in live]
    col = {v: k for k, v in enumerate(unknown)}
    rows, rhs = [], []
    for v in unknown:
        row = {col[v]: ONE}
        b = Fraction(0)
        for e in chain.edges[v]:
            if e.target in goal:
                b += e.prob
            elif e.target in col:
                row[col[e.target]] = row.get(col[e.target], 0) - e.prob
        rows.append(row)
        rhs.append(b)
    x = linalg.solve_sparse(len(unknown), rows, rhs)
    return x[col[chain.initial]]


def expected_truncated_sum(chain: InducedChain, spec: TruncatedSumSpec):
    """``E[TS]`` as a Fraction, or :data:`INFINITE` when the target is
    missed with positive probability."""
    require_positive(chain.mdp, spec.dimension, spec.target)
    goal = chain.target_nodes(spec.target)
    if chain.initial in goal:
        return Fraction(0)
    if reach_probability(chain, spec.target) != 1:
        return INFINITE
    # every node reachable before the target reaches it almost surely
    unknown = [v for v in _reachable_avoiding(chain, goal) if v not in goal]
    col = {v: k for k, v in enumerate(unknown)}
    d = spec.dimension
    rows, rhs = [], []
    for v in unknown:
        row = {col[v]: ONE}
        b = Fraction(0)
        for e in chain.edges[v]:
            b += e.prob * e.weight[d]
            if e.target in col:
                row[col[e.target]] = row.get(col[e.target], 0) - e.prob
        rows.append(row)
        rhs.append(b)
    x = linalg.solve_sparse(len(unknown), rows, rhs)
    return x[col[chain.initial]]


def prob_ts_leq(chain: InducedChain, spec: TruncatedSumSpec) -> Fraction:
    """Exact ``P[TS <= bound]``.

    Fills a table ``p[spent][node]`` from ``spent = bound`` downwards;
    weights are at least one, so every step reads strictly larger budgets.
    """
    if spec.bound is None:
        raise ValueError("prob_ts_leq needs a bound")
    require_positive(chain.mdp, spec.dimension, spec.target)
    goal = chain.target_nodes(spec.target)
    bound, d = spec.bound, spec.dimension
    n = len(chain.nodes)
    table: list[list[Fraction]] = [[]] * (bound + 1)
    for spent in range(bound, -1, -1):
        row = [Fraction(0)] * n
        for v in range(n):
            if v in goal:
                row[v] = ONE
                continue
            acc = Fraction(0)
            for e in chain.edges[v]:
                nxt = spent + e.weight[d]
                if nxt <= bound:
                    acc += e.prob * table[nxt][e.target]
            row[v] = acc
        table[spent] = row
    return table[0][chain.initial]


def worst_truncated_sum(chain: InducedChain, target: Iterable[State], dimension: int):
    """Largest truncated sum over all runs of the chain (probabilities ignored).

    :data:`INFINITE` when some run can avoid the target forever.
    """
    require_positive(chain.mdp, dimension, frozenset(target))
    goal = chain.target_nodes(target)
    if chain.initial in goal:
        return 0
    live = _reachable_avoiding(chain, goal)
    # a run avoids the target forever iff a cycle is reachable outside it
    inner = [v for v in live if v not in goal]
    inner_set = set(inner)
    state = dict.fromkeys(inner, 0)  # 0 new, 1 on stack, 2 done
    post: list[int] = []
    for root in inner:
        if state[root]:
            continue
        stack = [(root, iter(chain.edges[root]))]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            for e in it:
                w = e.target
                if w not in inner_set:
                    continue
                if state[w] == 1:
                    return INFINITE
                if state[w] == 0:
                    state[w] = 1
                    stack.append((w, iter(chain.edges[w])))
                    break
            else:
                state[v] = 2
                post.append(v)
                stack.pop()
    longest: dict[int, int] = {}
    for v in post:  # successors are finished before v
        best = 0
        for e in chain.edges[v]:
            tail = 0 if e.target in goal else longest[e.target]
            best = max(best, e.weight[dimension] + tail)
        longest[v] = best
    return longest[chain.initial]
