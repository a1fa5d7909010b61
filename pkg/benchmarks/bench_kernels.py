"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--nodes 200] [--runs 100000]

Both paths must agree exactly; the script checks that before timing.
"""

import argparse
import time

import numpy as np

from sspgames import kernels
from sspgames.formats import fixture_path, parse_model, parse_strategy
from sspgames.payoff import TruncatedSumSpec
from sspgames.sim import compile_chain


def best_of(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_graph(n, degree, rng):
    src = np.repeat(np.arange(n, dtype=np.int64), degree)
    dst = rng.integers(0, n, size=n * degree).astype(np.int64)
    w = rng.integers(-5, 20, size=n * degree).astype(np.int64)
    return src, dst, w


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=200)
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--runs", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if not kernels.USE_NUMBA:
        print("numba disabled (SSPGAMES_DISABLE_NUMBA set or numba missing); nothing to compare")
        return

    rng = np.random.default_rng(args.seed)
    n = args.nodes
    src, dst, w = random_graph(n, args.degree, rng)
    mdp = parse_model(fixture_path("commuting.json"))
    strategy = parse_strategy(fixture_path("strategy-car.json"))
    specs = (TruncatedSumSpec.of(mdp, ["work"], "time"),
             TruncatedSumSpec.of(mdp, ["work"], "time", 40))
    cc = compile_chain(mdp, strategy, specs)
    sim_args = (args.seed, args.runs, 10_000, cc.initial, cc.start, cc.end, cc.cum, cc.nxt,
                cc.weight, cc.is_target, cc.bounds)

    cases = [
        ("karp_table", kernels.karp_table_numba, kernels.karp_table_numpy, (n, src, dst, w)),
        ("bellman_ford", kernels.bellman_ford_numba, kernels.bellman_ford_numpy,
         (n, src, dst, np.abs(w), 0)),
        ("simulate", kernels.simulate_numba, kernels.simulate_numpy, sim_args),
    ]
    print(f"{'kernel':<14}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for name, fast, slow, fargs in cases:
        a, b = fast(*fargs), slow(*fargs)  # also compiles the numba version
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        assert all(np.array_equal(x, y) for x, y in zip(a, b)), f"{name}: paths disagree"
        t_fast = best_of(lambda: fast(*fargs))
        t_slow = best_of(lambda: slow(*fargs))
        print(f"{name:<14}{t_fast:>12.4f}{t_slow:>12.4f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
