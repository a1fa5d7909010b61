"""Random models and brute-force oracles shared by the tests."""

import itertools
import random
from fractions import Fraction

import networkx as nx

from sspgames.chain import expected_truncated_sum, induce_chain, worst_truncated_sum
from sspgames.model import MooreStrategy, validate_game, validate_mdp
from sspgames.payoff import TruncatedSumSpec


def random_distribution(rng, states, max_support=3, denom=10):
    support = rng.sample(states, rng.randint(1, min(max_support, len(states))))
    cuts = sorted(rng.sample(range(1, denom), len(support) - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [denom])]
    return {s: f"{p}/{denom}" for s, p in zip(support, parts)}


def random_mdp(rng, n_states, max_actions=3, max_weight=5, dims=1):
    """States s0..s{n-1}; the last one is the target and loops on itself."""
    states = [f"s{i}" for i in range(n_states)]
    actions = []
    for s in states[:-1]:
        for k in range(rng.randint(1, max_actions)):
            actions.append({"name": f"a{k}", "source": s,
                            "weight": [rng.randint(1, max_weight) for _ in range(dims)],
                            "dist": random_distribution(rng, states)})
    actions.append({"name": "stay", "source": states[-1], "weight": [1] * dims,
                    "dist": {states[-1]: "1"}})
    return validate_mdp({"type": "mdp", "dimensions": dims, "states": states,
                         "initial": states[0], "actions": actions})


def pure_memoryless(mdp):
    """Every pure memoryless strategy of ``mdp``."""
    names = [[a.name for a in mdp.available(s)] for s in mdp.states]
    for combo in itertools.product(*names):
        yield MooreStrategy.memoryless(dict(zip(mdp.states, combo)))


def brute_expectation(mdp, target, d=0):
    spec = TruncatedSumSpec(frozenset(target), d)
    return min(expected_truncated_sum(induce_chain(mdp, s, absorbing=target), spec)
               for s in pure_memoryless(mdp))


def brute_worstcase(mdp, target, d=0):
    return min(worst_truncated_sum(induce_chain(mdp, s, absorbing=target), target, d)
               for s in pure_memoryless(mdp))


def random_game_graph(rng, n, max_out=3, low=-5, high=5):
    """Single-player game: a pure memoryless strategy makes it a plain graph."""
    states = [f"v{i}" for i in range(n)]
    edges = []
    for s in states:
        for t in rng.sample(states, rng.randint(1, min(max_out, n))):
            edges.append({"source": s, "target": t, "weight": [rng.randint(low, high)]})
    return validate_game({"type": "game", "dimensions": 1, "states": states, "initial": states[0],
                          "players": {"1": [], "2": states}, "edges": edges})


def brute_max_mean(product, d=0):
    """Maximum mean over the simple cycles of the product graph."""
    best = {}
    for e in product.edges:
        key = (e.source, e.target)
        best[key] = max(best.get(key, e.weight[d]), e.weight[d])
    simple = nx.DiGraph(list(best))
    top = None
    for cyc in nx.simple_cycles(simple):
        total = sum(best[(cyc[i], cyc[(i + 1) % len(cyc)])] for i in range(len(cyc)))
        mean = Fraction(total, len(cyc))
        top = mean if top is None else max(top, mean)
    return top


def seeded(seed):
    return random.Random(seed)
