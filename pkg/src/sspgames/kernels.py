"""Integer/float inner loops: Karp's walk table, Bellman-Ford, Monte Carlo.

Each kernel exists twice: a loop version compiled with numba and a
vectorized numpy version.  Both return bit-identical results.  Setting
``SSPGAMES_DISABLE_NUMBA=1`` (or running without numba installed) selects
the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

NEG_INF = np.iinfo(np.int64).min // 4
POS_INF = np.iinfo(np.int64).max // 4

_MASK64 = (1 << 64) - 1
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def _numba_wanted() -> bool:
    if os.environ.get("SSPGAMES_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _numba_wanted()


# --------------------------------------------------------------------------
# numpy versions


def karp_table_numpy(n, src, dst, w):
    """``table[k, v]`` = heaviest walk of exactly ``k`` edges ending in ``v``
    (walks may start anywhere), ``NEG_INF`` when none exists."""
    table = np.full((n + 1, n), NEG_INF, dtype=np.int64)
    table[0, :] = 0
    for k in range(1, n + 1):
        prev = table[k - 1, src]
        ok = prev > NEG_INF
        cand = np.where(ok, prev + w, NEG_INF)
        np.maximum.at(table[k], dst, cand)
    return table


def bellman_ford_numpy(n, src, dst, w, start):
    """Shortest distances from ``start``, or from every node at distance 0
    when ``start < 0``.  Synchronous rounds: round ``k`` only reads the
    distances of round ``k - 1``.  Returns ``(dist, negative)`` where
    ``negative`` tells whether a negative cycle is reachable."""
    dist = np.full(n, POS_INF, dtype=np.int64)
    if start < 0:
        dist[:] = 0
    else:
        dist[start] = 0
    for _ in range(n + 1):
        base = dist[src]
        cand = np.where(base < POS_INF, base + w, POS_INF)
        new = dist.copy()
        np.minimum.at(new, dst, cand)
        if np.array_equal(new, dist):
            return dist, False
        dist = new
    return dist, True


def _mix64_np(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def uniform_numpy(seed, runs, step):
    """Counter-based uniforms in [0, 1): a pure function of (seed, run, step)."""
    with np.errstate(over="ignore"):
        key = _mix64_np(np.uint64(seed) + GOLDEN * (runs.astype(np.uint64) + _ONE))
        z = _mix64_np(key + GOLDEN * (np.uint64(step) + _ONE))
    return (z >> _S11).astype(np.float64) * _INV53


def simulate_numpy(seed, runs, horizon, initial, start, end, cum, nxt, weight,
                   is_target, bounds):
    """Run ``runs`` walks of a compiled chain.

    ``start[v]:end[v]`` indexes the outcomes of node ``v`` (cumulative
    probabilities ``cum``, successor ``nxt``, per-estimator weight rows
    ``weight``).  ``is_target[v, e]`` flags estimator targets; ``bounds[e]``
    lets a bounded estimator resolve as soon as its sum exceeds the bound
    (-1 disables).  Returns per-run sums, hit flags and step counts.
    """
    n_est = is_target.shape[1]
    sums = np.zeros((runs, n_est), dtype=np.int64)
    hit = np.zeros((runs, n_est), dtype=np.bool_)
    steps = np.zeros(runs, dtype=np.int64)
    node = np.full(runs, initial, dtype=np.int64)
    hit[:] = is_target[initial][None, :]
    over = np.zeros((runs, n_est), dtype=np.bool_)
    active = np.nonzero(~np.all(hit, axis=1))[0]
    max_deg = int((end - start).max()) if len(start) else 1
    for step in range(horizon):
        if len(active) == 0:
            break
        u = uniform_numpy(seed, active, step)
        cur = node[active]
        idx = start[cur].copy()
        last = end[cur] - 1
        for _ in range(max_deg - 1):
            idx += (idx < last) & (u >= cum[idx])
        w = weight[idx]
        open_ = ~hit[active]
        sums[active] += np.where(open_, w, 0)
        new = nxt[idx]
        node[active] = new
        steps[active] += 1
        hit[active] |= open_ & is_target[new]
        over[active] = (bounds[None, :] >= 0) & (sums[active] > bounds[None, :])
        resolved = hit[active] | over[active]
        active = active[~np.all(resolved, axis=1)]
    return sums, hit, steps


# --------------------------------------------------------------------------
# numba versions

if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def karp_table_numba(n, src, dst, w):
        table = np.full((n + 1, n), NEG_INF, dtype=np.int64)
        for v in range(n):
            table[0, v] = 0
        for k in range(1, n + 1):
            for e in range(len(src)):
                prev = table[k - 1, src[e]]
                if prev > NEG_INF:
                    c = prev + w[e]
                    if c > table[k, dst[e]]:
                        table[k, dst[e]] = c
        return table

    @njit(cache=True)
    def bellman_ford_numba(n, src, dst, w, start):
        dist = np.full(n, POS_INF, dtype=np.int64)
        if start < 0:
            for v in range(n):
                dist[v] = 0
        else:
            dist[start] = 0
        for _ in range(n + 1):
            old = dist.copy()
            changed = False
            for e in range(len(src)):
                base = old[src[e]]
                if base < POS_INF and base + w[e] < dist[dst[e]]:
                    dist[dst[e]] = base + w[e]
                    changed = True
            if not changed:
                return dist, False
        return dist, True

    @njit(cache=True)
    def _mix64_nb(z):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)

    @njit(cache=True)
    def _uniform_nb(seed, run, step):
        key = _mix64_nb(seed + GOLDEN * (np.uint64(run) + _ONE))
        z = _mix64_nb(key + GOLDEN * (np.uint64(step) + _ONE))
        return np.float64(z >> _S11) * _INV53

    @njit(cache=True)
    def simulate_numba(seed, runs, horizon, initial, start, end, cum, nxt, weight,
                       is_target, bounds):
        n_est = is_target.shape[1]
        sums = np.zeros((runs, n_est), dtype=np.int64)
        hit = np.zeros((runs, n_est), dtype=np.bool_)
        steps = np.zeros(runs, dtype=np.int64)
        useed = np.uint64(seed)
        for r in range(runs):
            v = initial
            done = True
            for e in range(n_est):
                hit[r, e] = is_target[v, e]
                if not hit[r, e]:
                    done = False
            t = 0
            while not done and t < horizon:
                u = _uniform_nb(useed, r, t)
                j = start[v]
                last = end[v] - 1
                while j < last and u >= cum[j]:
                    j += 1
                v = nxt[j]
                t += 1
                done = True
                for e in range(n_est):
                    if not hit[r, e]:
                        sums[r, e] += weight[j, e]
                        if is_target[v, e]:
                            hit[r, e] = True
                    if not hit[r, e] and not (bounds[e] >= 0 and sums[r, e] > bounds[e]):
                        done = False
            steps[r] = t
        return sums, hit, steps

    karp_table = karp_table_numba
    bellman_ford = bellman_ford_numba
    simulate_runs = simulate_numba
else:
    karp_table = karp_table_numpy
    bellman_ford = bellman_ford_numpy
    simulate_runs = simulate_numpy
