"""Minimal expected and minimal worst-case truncated sums.

Both problems admit optimal pure memoryless strategies, which is what the
solvers return.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .model import Edge, MooreStrategy, State, WeightedGame, WeightedMDP, first_action_fallback
from .payoff import INFINITE, require_positive, require_positive_game, target_set


@dataclass(frozen=True)
class ExpectationResult:
    value: object  # Fraction or INFINITE
    strategy: MooreStrategy
    values: dict  # state -> Fraction | INFINITE

    def decide(self, threshold) -> bool:
        return self.value is not INFINITE and self.value <= threshold


@dataclass(frozen=True)
class WorstCaseResult:
    value: object  # int or INFINITE
    strategy: MooreStrategy
    values: dict  # state -> int | INFINITE

    def decide(self, threshold) -> bool:
        return self.value is not INFINITE and self.value <= threshold


def almost_sure_states(mdp: WeightedMDP, target: frozenset) -> tuple[set, dict]:
    """States from which some strategy reaches ``target`` with probability one.

    Returns the set together with a proper memoryless policy on it, taken
    from the final backward layering (each chosen action stays inside the
    set and moves one layer closer to the target with positive probability).
    """
    alive = set(mdp.states)
    while True:
        allowed = {
            s: [a for a in mdp.available(s) if set(a.support()) <= alive]
            for s in alive if s not in target
        }
        reached = set(target) & alive
        policy: dict = {}
        frontier = set(reached)
        while frontier:
            nxt = set()
            for s, acts in allowed.items():
                if s in reached:
                    continue
                for a in acts:
                    if any(t in frontier for t in a.support()):
                        policy[s] = a.name
                        nxt.add(s)
                        break
            reached |= nxt
            frontier = nxt
        if reached == alive:
            return alive, policy
        alive = reached


def solve_expectation(mdp: WeightedMDP, target, dimension) -> ExpectationResult:
    """Minimize ``E[TS]`` by policy iteration over proper memoryless policies."""
    target = target_set(mdp, target)
    d = mdp.dim_index(dimension)
    require_positive(mdp, d, target)
    good, policy = almost_sure_states(mdp, target)
    allowed = {s: [a for a in mdp.available(s) if set(a.support()) <= good]
               for s in good if s not in target}
    inner = [s for s in mdp.states if s in good and s not in target]
    col = {s: k for k, s in enumerate(inner)}

    def evaluate(pol):
        rows, rhs = [], []
        for s in inner:
            act = mdp.action(s, pol[s])
            row = {col[s]: Fraction(1)}
            for t, p in act.dist:
                if t in col:
                    row[col[t]] = row.get(col[t], 0) - p
            rows.append(row)
            rhs.append(Fraction(act.weight[d]))
        x = linalg.solve_sparse(len(inner), rows, rhs)
        v = {s: x[col[s]] for s in inner}
        v.update({t: Fraction(0) for t in target})
        return v

    def q_value(act, v):
        return act.weight[d] + sum((p * v[t] for t, p in act.dist), Fraction(0))

    values = evaluate(policy)
    while True:
        changed = False
        for s in inner:
            current = q_value(mdp.action(s, policy[s]), values)
            best_name, best = policy[s], current
            for act in allowed[s]:  # sorted by name: first strict improvement wins ties
                q = q_value(act, values)
                if q < best:
                    best_name, best = act.name, q
            if best < current:
                policy[s] = best_name
                changed = True
        if not changed:
            break
        values = evaluate(policy)

    choices = first_action_fallback(mdp)
    choices.update(policy)
    all_values = {s: values.get(s, INFINITE) if s in good else INFINITE for s in mdp.states}
    return ExpectationResult(all_values[mdp.initial], MooreStrategy.memoryless(choices), all_values)


# --------------------------------------------------------------------------
# worst case


def adversarial_view(mdp: WeightedMDP) -> WeightedGame:
    """Game where an adversary resolves every probabilistic choice.

    Player-1 states are the MDP states; each pair ``(s, a)`` becomes a
    player-2 node entered with the action's weight and left with zero weight
    towards every state in the support.
    """
    zero = (0,) * mdp.dimensions
    edges = []
    p2 = []
    for a in mdp.actions:
        node = (a.source, a.name)
        p2.append(node)
        edges.append(Edge(a.name, a.source, node, a.weight))
        for t in a.support():
            edges.append(Edge(str(t), node, t, zero))
    order = tuple(mdp.states) + tuple(p2)
    return WeightedGame(frozenset(mdp.states), frozenset(p2), mdp.initial, tuple(edges),
                        mdp.dimension_names, order)


def game_worstcase_values(game: WeightedGame, target: frozenset, d: int) -> tuple[dict, dict]:
    """Min-max truncated sums for every state plus player 1's optimal edges.

    Dijkstra-like finalization: a player-1 node is settled through its
    cheapest settled successor, a player-2 node once all of its successors
    are settled.  Sound because no cycle has total weight zero.
    """
    rank = {s: i for i, s in enumerate(game.order)}
    preds: dict = {s: [] for s in game.order}
    pending = {}
    for s in game.order:
        out = game.outgoing(s)
        pending[s] = len(out)
        for e in out:
            preds[e.target].append(e)
    worst2: dict = {s: 0 for s in game.states2}
    value: dict = {}
    heap = [(0, rank[t], t) for t in target]
    heapq.heapify(heap)
    while heap:
        v, _, s = heapq.heappop(heap)
        if s in value:
            continue
        value[s] = v
        for e in preds[s]:
            u = e.source
            if u in value or u in target:
                continue
            cand = v + e.weight[d]
            if game.owner(u) == 1:
                heapq.heappush(heap, (cand, rank[u], u))
            else:
                worst2[u] = max(worst2[u], cand)
                pending[u] -= 1
                if pending[u] == 0:
                    heapq.heappush(heap, (worst2[u], rank[u], u))

    best_edge = {}
    for s in game.order:
        if game.owner(s) != 1 or s in target or s not in value:
            continue
        best = None
        for e in game.outgoing(s):  # sorted by name
            if e.target in value:
                c = e.weight[d] + value[e.target]
                if best is None or c < best[0] or (c == best[0] and rank[e.target] < best[1]):
                    best = (c, rank[e.target], e.name)
        best_edge[s] = best[2]
    return {s: value.get(s, INFINITE) for s in game.order}, best_edge


def solve_worstcase(model: WeightedMDP | WeightedGame, target, dimension) -> WorstCaseResult:
    """Minimize the largest truncated sum any adversary can force."""
    target = target_set(model, target)
    d = model.dim_index(dimension)
    if isinstance(model, WeightedMDP):
        require_positive(model, d, target)
        game = adversarial_view(model)
        values, edges = game_worstcase_values(game, target, d)
        choices = first_action_fallback(model)
        choices.update(edges)  # edge names of the view are action names
        values = {s: values[s] for s in model.states}
    else:
        require_positive_game(model, d, target)
        values, edges = game_worstcase_values(model, target, d)
        choices = {s: model.outgoing(s)[0].name for s in model.order if model.owner(s) == 1}
        choices.update(edges)
    return WorstCaseResult(values[model.initial], MooreStrategy.memoryless(choices), values)


def follow_path(game: WeightedGame, strategy: MooreStrategy) -> list[State]:
    """Path followed by a pure memoryless strategy on an adversary-free game,
    starting at the initial state and stopping at the first repeated state."""
    path = [game.initial]
    choice = strategy.as_memoryless_map()
    seen = {game.initial}
    s = game.initial
    while True:
        s = game.edge(s, choice[s]).target
        path.append(s)
        if s in seen:
            return path
        seen.add(s)
