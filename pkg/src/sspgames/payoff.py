"""Truncated-sum payoff: target sets, query specs and the infinite marker."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable

from .model import State, WeightedGame, WeightedMDP


class _Infinite:
    """Value of a truncated sum whose target is missed with positive
    probability (or on some run, for worst-case queries)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinite, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("sspgames.INFINITE")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, Real):
            return True
        return NotImplemented

    def __ge__(self, other):
        return other is self or isinstance(other, Real)


INFINITE = _Infinite()


def is_infinite(value) -> bool:
    return value is INFINITE


def target_set(model: WeightedMDP | WeightedGame, states: Iterable[State]) -> frozenset:
    """Validate a target set against the model's states."""
    target = frozenset(states)
    if not target:
        raise ValueError("target set must be non-empty")
    unknown = target - set(model.states)
    if unknown:
        raise ValueError(f"target contains unknown states {sorted(unknown, key=repr)}")
    return target


@dataclass(frozen=True)
class TruncatedSumSpec:
    target: frozenset
    dimension: int
    bound: int | None = None

    @classmethod
    def of(cls, model, target, dimension, bound=None) -> "TruncatedSumSpec":
        if bound is not None and (isinstance(bound, bool) or int(bound) != bound or bound < 0):
            raise ValueError(f"bound must be a natural number, got {bound!r}")
        return cls(target_set(model, target), model.dim_index(dimension),
                   None if bound is None else int(bound))


def require_positive(mdp: WeightedMDP, dimension: int, target: frozenset) -> None:
    """Every action that can contribute to the truncated sum has weight >= 1."""
    for a in mdp.actions:
        if a.source not in target and a.weight[dimension] <= 0:
            raise ValueError(
                f"non-positive weight {a.weight[dimension]} on dimension "
                f"{mdp.dimension_names[dimension]!r} for action {a.name!r} at {a.source!r}")


def require_positive_game(game: WeightedGame, dimension: int, target: frozenset) -> None:
    for e in game.edges:
        if e.source not in target and e.weight[dimension] <= 0:
            raise ValueError(
                f"non-positive weight {e.weight[dimension]} on dimension "
                f"{game.dimension_names[dimension]!r} for edge {e.name!r} at {e.source!r}")


def check_probability(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"probability threshold {alpha} outside [0, 1]")
    return alpha
