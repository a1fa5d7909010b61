"""Checking a pure finite-memory controller against every adversary.

Fixing player 1's strategy leaves a finite graph (the product of the game
with the strategy's memory) whose paths are exactly the consistent plays.
Energy, Büchi and mean-payoff objectives then become plain graph questions
on that product.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .model import IncompleteStrategyError, ModelError, MooreStrategy, State, WeightedGame


@dataclass(frozen=True)
class ProductEdge:
    source: int
    target: int
    label: str
    weight: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ProductGraph:
    game: WeightedGame
    nodes: tuple[tuple[State, str], ...]  # node 0 is initial
    edges: tuple[ProductEdge, ...]

    def __len__(self):
        return len(self.nodes)

    def arrays(self, dimension: int, sign: int = 1):
        src = np.array([e.source for e in self.edges], dtype=np.int64)
        dst = np.array([e.target for e in self.edges], dtype=np.int64)
        w = np.array([sign * e.weight[dimension] for e in self.edges], dtype=np.int64)
        return src, dst, w

    def successors(self) -> list[list[ProductEdge]]:
        out: list[list[ProductEdge]] = [[] for _ in self.nodes]
        for e in self.edges:
            out[e.source].append(e)
        return out


def build_product(game: WeightedGame, strategy: MooreStrategy) -> ProductGraph:
    if not strategy.is_pure:
        raise ModelError(["only pure strategies can be verified"])
    start = (game.initial, strategy.initial_memory)
    index = {start: 0}
    nodes = [start]
    edges = []
    queue = deque([start])
    while queue:
        s, m = queue.popleft()
        i = index[(s, m)]
        if game.owner(s) == 1:
            ((name, _),) = strategy.distribution(m, s)
            if not game.has_edge(s, name):
                raise IncompleteStrategyError(f"strategy picks {name!r} at {s!r}, no such edge")
            moves = [game.edge(s, name)]
        else:
            moves = game.outgoing(s)
        for e in moves:
            node = (e.target, strategy.next_memory(m, e.target))
            j = index.get(node)
            if j is None:
                j = index[node] = len(nodes)
                nodes.append(node)
                queue.append(node)
            edges.append(ProductEdge(i, j, e.name, e.weight))
    return ProductGraph(game, tuple(nodes), tuple(edges))


# --------------------------------------------------------------------------
# energy


@dataclass(frozen=True)
class EnergyResult:
    dimension: str
    credit: int | None  # None: no finite initial credit suffices
    # lowest prefix path (credit) or a negative cycle (no credit), as node lists
    witness: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.credit is not None


def _tight_path(product: ProductGraph, dist, w, goal: int) -> list[int]:
    """A path from the initial node to ``goal`` using only edges with
    ``dist[u] + w == dist[v]``; its weight is ``dist[goal]``."""
    succ = product.successors()
    parent = {0: None}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        if u == goal:
            break
        for k, e in enumerate(succ[u]):
            if e.target not in parent and dist[u] + e.weight[w] == dist[e.target]:
                parent[e.target] = u
                queue.append(e.target)
    path = [goal]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def negative_cycle(product: ProductGraph, dimension: int) -> list[int] | None:
    """A reachable cycle with negative total weight (node list, first node
    repeated at the end), found with sequential Bellman-Ford predecessors."""
    n = len(product.nodes)
    dist = [None] * n
    dist[0] = 0
    pred = [-1] * n
    last = -1
    for _ in range(n):
        last = -1
        for e in product.edges:
            du = dist[e.source]
            if du is None:
                continue
            c = du + e.weight[dimension]
            if dist[e.target] is None or c < dist[e.target]:
                dist[e.target] = c
                pred[e.target] = e.source
                last = e.target
        if last < 0:
            return None
    v = last
    for _ in range(n):
        v = pred[v]
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    cycle.append(v)
    return cycle[::-1]


def check_energy(product: ProductGraph, dimensions) -> dict[str, EnergyResult]:
    """Minimal initial credit per dimension so that the running sum never
    drops below zero along any play of the product."""
    game = product.game
    out = {}
    for dim in dimensions:
        d = game.dim_index(dim)
        name = game.dimension_names[d]
        src, dst, w = product.arrays(d)
        dist, negative = kernels.bellman_ford(len(product.nodes), src, dst, w, 0)
        if negative:
            out[name] = EnergyResult(name, None, negative_cycle(product, d) or [])
            continue
        low = int(dist.min())
        goal = int(np.argmin(dist))
        credit = max(0, -low)
        out[name] = EnergyResult(name, credit, _tight_path(product, dist, d, goal) if credit else [0])
    return out


# --------------------------------------------------------------------------
# Büchi


@dataclass(frozen=True)
class BuchiResult:
    ok: bool
    cycle: list  # a reachable cycle avoiding every accepting node, when not ok


def _find_cycle(n: int, succ: list[list[int]], allowed) -> list[int] | None:
    color = [0] * n
    for root in range(n):
        if not allowed[root] or color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        path = [root]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if not allowed[w]:
                    continue
                if color[w] == 1:
                    k = path.index(w)
                    return path[k:] + [w]
                if color[w] == 0:
                    color[w] = 1
                    stack.append((w, iter(succ[w])))
                    path.append(w)
                    break
            else:
                color[v] = 2
                stack.pop()
                path.pop()
    return None


def check_buchi(product: ProductGraph, accepting) -> BuchiResult:
    accepting = set(accepting)
    allowed = [s not in accepting for s, _ in product.nodes]
    succ = [[e.target for e in out] for out in product.successors()]
    cycle = _find_cycle(len(product.nodes), succ, allowed)
    return BuchiResult(cycle is None, cycle or [])


# --------------------------------------------------------------------------
# mean payoff


@dataclass(frozen=True)
class MeanPayoffResult:
    ok: bool
    max_mean: Fraction
    cycle: list  # a cycle achieving max_mean


def max_mean_cycle(product: ProductGraph, dimension: int) -> tuple[Fraction, list[int]]:
    """Karp's maximum cycle mean together with a cycle attaining it."""
    n = len(product.nodes)
    src, dst, w = product.arrays(dimension)
    table = kernels.karp_table(n, src, dst, w)
    best = None
    for v in range(n):
        top = int(table[n, v])
        if top <= kernels.NEG_INF:
            continue
        worst = None
        for k in range(n):
            if table[k, v] <= kernels.NEG_INF:
                continue
            r = Fraction(top - int(table[k, v]), n - k)
            if worst is None or r < worst:
                worst = r
        if best is None or worst > best:
            best = worst
    # tight-edge witness: after shifting weights to q*w - p the best cycles
    # weigh zero, no cycle is positive, and every zero cycle is tight
    p, q = best.numerator, best.denominator
    shifted = -(q * w - p)
    dist, negative = kernels.bellman_ford(n, src, dst, shifted, -1)
    assert not negative
    tight = [[] for _ in range(n)]
    for e in range(len(src)):
        if dist[src[e]] + shifted[e] == dist[dst[e]]:
            tight[src[e]].append(int(dst[e]))
    cycle = _find_cycle(n, tight, [True] * n)
    return best, cycle


def check_meanpayoff(product: ProductGraph, dimension, threshold, strict: bool = True) -> MeanPayoffResult:
    """Every play's long-run mean on ``dimension`` stays below ``threshold``
    (``<=`` when not strict), judged by the heaviest reachable cycle."""
    if not product.nodes:
        raise ValueError("empty product")
    d = product.game.dim_index(dimension)
    mean, cycle = max_mean_cycle(product, d)
    threshold = Fraction(threshold)
    ok = mean < threshold if strict else mean <= threshold
    return MeanPayoffResult(ok, mean, cycle)


# --------------------------------------------------------------------------
# combined


@dataclass(frozen=True)
class MeanPayoffSpec:
    dimension: str | int
    threshold: Fraction
    strict: bool = True


@dataclass(frozen=True)
class ObjectiveSpec:
    energy: tuple = ()
    meanpayoff: MeanPayoffSpec | None = None
    buchi: frozenset | None = None

    def __post_init__(self):
        if not self.energy and self.meanpayoff is None and self.buchi is None:
            raise ValueError("objective spec needs at least one objective")


@dataclass
class VerificationReport:
    product_size: int
    energy: dict = field(default_factory=dict)
    buchi: BuchiResult | None = None
    meanpayoff: MeanPayoffResult | None = None

    @property
    def passed(self) -> bool:
        return (all(r.ok for r in self.energy.values())
                and (self.buchi is None or self.buchi.ok)
                and (self.meanpayoff is None or self.meanpayoff.ok))


def verify(game: WeightedGame, strategy: MooreStrategy, objectives: ObjectiveSpec) -> VerificationReport:
    product = build_product(game, strategy)
    report = VerificationReport(len(product.nodes))
    if objectives.energy:
        report.energy = check_energy(product, objectives.energy)
    if objectives.buchi is not None:
        unknown = set(objectives.buchi) - set(game.states)
        if unknown:
            raise ValueError(f"Büchi set has unknown states {sorted(unknown, key=repr)}")
        report.buchi = check_buchi(product, objectives.buchi)
    if objectives.meanpayoff is not None:
        mp = objectives.meanpayoff
        report.meanpayoff = check_meanpayoff(product, mp.dimension, mp.threshold, mp.strict)
    return report


def describe_path(product: ProductGraph, path: list[int]) -> list[str]:
    """Game states along a product path, for replaying witnesses."""
    return [product.nodes[i][0] for i in path]
