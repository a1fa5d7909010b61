"""Monte Carlo runs of a strategy, used to cross-check the exact solvers.

Draws come from a counter-based generator: the uniform used by run ``k`` at
step ``t`` is a fixed function of ``(seed, k, t)``.  Results therefore do
not depend on how runs are batched or which kernel executes them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from . import kernels
from .chain import induce_chain
from .model import MooreStrategy, WeightedMDP
from .payoff import TruncatedSumSpec, require_positive

DEFAULT_HORIZON = 10_000
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    runs: int
    seed: int
    horizon: int = DEFAULT_HORIZON
    # bound None: estimate E[TS]; otherwise estimate P[TS <= bound]
    estimators: tuple[TruncatedSumSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if isinstance(self.runs, bool) or int(self.runs) != self.runs or self.runs < 1:
            raise ValueError(f"runs must be a positive integer, got {self.runs!r}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.horizon!r}")
        if not self.estimators:
            raise ValueError("at least one estimator is required")


@dataclass(frozen=True)
class Estimate:
    kind: str  # "expectation" or "probability"
    bound: int | None
    estimate: float
    sd: float
    ci95: tuple[float, float]
    samples: int  # runs that contribute to the estimate
    censored: int  # runs still undecided at the horizon

    def contains(self, value) -> bool:
        return self.ci95[0] <= float(value) <= self.ci95[1]


@dataclass(frozen=True)
class SimReport:
    runs: int
    seed: int
    horizon: int
    estimates: tuple[Estimate, ...]


@dataclass(frozen=True)
class CompiledChain:
    initial: int
    start: np.ndarray
    end: np.ndarray
    cum: np.ndarray
    nxt: np.ndarray
    weight: np.ndarray  # (outcomes, estimators)
    is_target: np.ndarray  # (nodes, estimators)
    bounds: np.ndarray


def compile_chain(mdp: WeightedMDP, strategy: MooreStrategy, estimators) -> CompiledChain:
    # nodes that end every estimator need not be expanded
    stop = frozenset.intersection(*(e.target for e in estimators))
    chain = induce_chain(mdp, strategy, absorbing=stop)
    start, end, cum, nxt, weight = [], [], [], [], []
    for out in chain.edges:
        start.append(len(cum))
        acc = Fraction(0)
        for e in out:
            acc += e.prob
            cum.append(float(acc))
            nxt.append(e.target)
            weight.append([e.weight[s.dimension] for s in estimators])
        end.append(len(cum))
    is_target = np.array([[chain.state(i) in s.target for s in estimators]
                          for i in range(len(chain))], dtype=np.bool_)
    bounds = np.array([-1 if s.bound is None else s.bound for s in estimators], dtype=np.int64)
    return CompiledChain(
        0,
        np.array(start, dtype=np.int64),
        np.array(end, dtype=np.int64),
        np.array(cum, dtype=np.float64),
        np.array(nxt, dtype=np.int64),
        np.array(weight, dtype=np.int64).reshape(len(cum), len(estimators)),
        is_target,
        bounds,
    )


def _summary(kind, bound, values: np.ndarray, censored: int) -> Estimate:
    n = len(values)
    if n == 0:
        nan = float("nan")
        return Estimate(kind, bound, nan, nan, (nan, nan), 0, censored)
    mean = float(values.mean())
    sd = float(values.std(ddof=1)) if n > 1 else 0.0
    half = NormalDist().inv_cdf(0.975) * sd / math.sqrt(n)
    return Estimate(kind, bound, mean, sd, (mean - half, mean + half), n, censored)


def simulate(mdp: WeightedMDP, strategy: MooreStrategy, config: SimConfig,
             use_numba: bool | None = None) -> SimReport:
    for spec in config.estimators:
        require_positive(mdp, spec.dimension, spec.target)
    cc = compile_chain(mdp, strategy, config.estimators)
    run = kernels.simulate_runs
    if use_numba is False or (use_numba is None and not kernels.USE_NUMBA):
        run = kernels.simulate_numpy
    seed = config.seed & _MASK64
    sums, hit, _ = run(seed, int(config.runs), int(config.horizon), cc.initial, cc.start,
                       cc.end, cc.cum, cc.nxt, cc.weight, cc.is_target, cc.bounds)
    estimates = []
    for k, spec in enumerate(config.estimators):
        s, h = sums[:, k], hit[:, k]
        if spec.bound is None:
            done = h
            estimates.append(_summary("expectation", None, s[done].astype(np.float64),
                                      int((~done).sum())))
        else:
            over = s > spec.bound
            done = h | over
            ok = h & ~over
            estimates.append(_summary("probability", spec.bound, ok[done].astype(np.float64),
                                      int((~done).sum())))
    return SimReport(int(config.runs), config.seed, int(config.horizon), tuple(estimates))
