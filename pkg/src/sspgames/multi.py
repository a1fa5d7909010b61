"""Multi-constraint percentile queries.

Each constraint tracks its own accumulated cost.  The product of the MDP
with these counters resolves every constraint after finitely many steps
(weights on the constrained dimensions are at least one), so the unfolding
is a DAG ending in absorbing "all resolved" nodes.  A randomized memoryless
strategy on the unfolding is read off a feasible occupation measure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .lp import LinearProgram, lp_feasible
from .model import MooreStrategy, State, WeightedMDP, first_action_fallback
from .payoff import check_probability, require_positive, target_set

SAT, FAIL = "sat", "fail"
DONE = "done"


@dataclass(frozen=True)
class PercentileConstraint:
    target: frozenset
    dimension: int
    bound: int
    alpha: Fraction

    @classmethod
    def of(cls, mdp: WeightedMDP, target, dimension, bound, alpha) -> "PercentileConstraint":
        if isinstance(bound, bool) or int(bound) != bound or bound < 0:
            raise ValueError(f"bound must be a natural number, got {bound!r}")
        return cls(target_set(mdp, target), mdp.dim_index(dimension), int(bound),
                   check_probability(alpha))


@dataclass
class MultiUnfolding:
    nodes: list  # (state, status tuple); index 0 is the initial node
    # node index -> [(action name, [(prob, node index, successor state)])]
    transitions: dict
    terminal: list  # bool per node: every constraint resolved

    def status(self, i: int) -> tuple:
        return self.nodes[i][1]


def _advance(status: tuple, constraints, weight, succ) -> tuple:
    out = []
    for st, c in zip(status, constraints):
        if st in (SAT, FAIL):
            out.append(st)
            continue
        cost = st + weight[c.dimension]
        if cost > c.bound:
            out.append(FAIL)
        elif succ in c.target:
            out.append(SAT)
        else:
            out.append(cost)
    return tuple(out)


def build_unfolding(mdp: WeightedMDP, constraints) -> MultiUnfolding:
    init_status = tuple(SAT if mdp.initial in c.target else 0 for c in constraints)
    start = (mdp.initial, init_status)
    index = {start: 0}
    nodes = [start]
    terminal = []
    transitions: dict = {}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        s, status = node
        i = index[node]
        done = all(st in (SAT, FAIL) for st in status)
        terminal.append(done)
        if done:
            continue
        outs = []
        for act in mdp.available(s):
            succ = []
            for t, p in act.dist:
                nxt = (t, _advance(status, constraints, act.weight, t))
                if all(st in (SAT, FAIL) for st in nxt[1]):
                    nxt = (None, nxt[1])  # resolved nodes only differ by status
                j = index.get(nxt)
                if j is None:
                    j = index[nxt] = len(nodes)
                    nodes.append(nxt)
                    queue.append(nxt)
                succ.append((p, j, t))
            outs.append((act.name, succ))
        transitions[i] = outs
    return MultiUnfolding(nodes, transitions, terminal)


@dataclass
class OccupationLP:
    """Flow variables ``y[node, action]`` over the non-terminal nodes."""

    unfolding: MultiUnfolding
    constraints: tuple
    columns: list  # (node index, action name) per variable
    program: LinearProgram

    @classmethod
    def build(cls, unfolding: MultiUnfolding, constraints) -> "OccupationLP":
        columns = [(i, a) for i in sorted(unfolding.transitions) for a, _ in unfolding.transitions[i]]
        col = {c: k for k, c in enumerate(columns)}
        lp = LinearProgram(len(columns))
        inflow: dict[int, dict] = {}
        for i, outs in unfolding.transitions.items():
            for a, succ in outs:
                for p, j, _ in succ:
                    row = inflow.setdefault(j, {})
                    row[col[(i, a)]] = row.get(col[(i, a)], 0) + p
        for i, outs in unfolding.transitions.items():
            # outflow - inflow = [i is initial]
            row = {col[(i, a)]: Fraction(1) for a, _ in outs}
            for k, p in inflow.get(i, {}).items():
                row[k] = row.get(k, 0) - p
            lp.add_eq(row, 1 if i == 0 else 0)
        for n, c in enumerate(constraints):
            row: dict = {}
            for j, flows in inflow.items():
                if unfolding.terminal[j] and unfolding.status(j)[n] == SAT:
                    for k, p in flows.items():
                        row[k] = row.get(k, 0) + p
            lp.add_ge(row, c.alpha)
        return cls(unfolding, tuple(constraints), columns, lp)

    def terminal_mass(self, y) -> dict[int, Fraction]:
        """Probability of ending in each terminal node under flow ``y``."""
        mass: dict[int, Fraction] = {}
        col = {c: k for k, c in enumerate(self.columns)}
        for i, outs in self.unfolding.transitions.items():
            for a, succ in outs:
                for p, j, _ in succ:
                    if self.unfolding.terminal[j]:
                        mass[j] = mass.get(j, 0) + p * y[col[(i, a)]]
        return mass


@dataclass(frozen=True)
class MultiPercentileResult:
    verdict: bool
    strategy: MooreStrategy | None
    achieved: tuple | None  # per-constraint probability of the returned strategy


def _memory_name(node) -> str:
    s, status = node
    return f"{s}|" + ",".join(str(x) for x in status)


def solve_multi_percentile(mdp: WeightedMDP, constraints) -> MultiPercentileResult:
    constraints = tuple(constraints)
    if not constraints:
        raise ValueError("at least one percentile constraint is required")
    for c in constraints:
        require_positive(mdp, c.dimension, c.target)
    unf = build_unfolding(mdp, constraints)

    if unf.terminal[0]:
        achieved = tuple(Fraction(1 if st == SAT else 0) for st in unf.status(0))
        ok = all(a >= c.alpha for a, c in zip(achieved, constraints))
        strategy = _sink_strategy(mdp, DONE) if ok else None
        return MultiPercentileResult(ok, strategy, achieved if ok else None)

    occ = OccupationLP.build(unf, constraints)
    y = lp_feasible(occ.program)
    if y is None:
        return MultiPercentileResult(False, None, None)
    mass = occ.terminal_mass(y)
    achieved = tuple(
        sum((m for j, m in mass.items() if unf.status(j)[n] == SAT), Fraction(0))
        for n in range(len(constraints)))
    return MultiPercentileResult(True, _strategy_from_flow(mdp, occ, y), achieved)


def _sink_strategy(mdp: WeightedMDP, sink: str):
    fallback = first_action_fallback(mdp)
    choice = {(sink, s): ((fallback[s], Fraction(1)),) for s in mdp.states}
    return MooreStrategy((sink,), sink, choice, {(sink, "*"): sink})


def _strategy_from_flow(mdp: WeightedMDP, occ: OccupationLP, y) -> MooreStrategy:
    unf = occ.unfolding
    col = {c: k for k, c in enumerate(occ.columns)}
    fallback = first_action_fallback(mdp)
    memory = [DONE]
    choice = {(DONE, s): ((fallback[s], Fraction(1)),) for s in mdp.states}
    update = {(DONE, "*"): DONE}
    action_update = {}
    for i, outs in unf.transitions.items():
        total = sum((y[col[(i, a)]] for a, _ in outs), Fraction(0))
        if total == 0:
            continue  # never reached under this flow
        m = _memory_name(unf.nodes[i])
        memory.append(m)
        s = unf.nodes[i][0]
        dist = tuple((a, y[col[(i, a)]] / total) for a, _ in outs if y[col[(i, a)]] > 0)
        choice[(m, s)] = dist
        for a, succ in outs:
            if y[col[(i, a)]] == 0:
                continue
            for _, j, t in succ:
                action_update[(m, a, t)] = DONE if unf.terminal[j] else _memory_name(unf.nodes[j])
    return MooreStrategy(tuple(memory), _memory_name(unf.nodes[0]), choice, update, action_update)
