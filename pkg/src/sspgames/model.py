"""Weighted MDPs, weighted two-player games and Moore-machine strategies.

Everything here is immutable once validated.  Probabilities are exact
``Fraction`` values; weights are integer tuples of the model's dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping

State = Hashable
Memory = str


class ModelError(ValueError):
    """Raised when a model or strategy description violates an invariant.

    ``errors`` holds every violation found, not only the first one.
    """

    def __init__(self, errors: Iterable[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class IncompleteStrategyError(KeyError):
    """A strategy has no choice (or no memory update) for a reachable pair."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "incomplete strategy"


def to_fraction(value: Any) -> Fraction:
    """Exact rational from ``"7/10"``, ``"0.7"``, ints, Decimals or Fractions.

    Floats go through their shortest repr, so ``0.7`` means 7/10.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a probability: {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"not a rational: {value!r}")


def render_fraction(value: Fraction) -> str:
    """Canonical ``p/q`` rendering (plain ``p`` for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _as_weight(raw: Any, dims: int, where: str, errors: list[str]) -> tuple[int, ...] | None:
    if isinstance(raw, (int,)) and not isinstance(raw, bool) and dims == 1:
        raw = [raw]
    if not isinstance(raw, (list, tuple)):
        errors.append(f"{where}: weight must be a list of {dims} integers")
        return None
    if len(raw) != dims:
        errors.append(f"{where}: weight has {len(raw)} entries, model declares {dims} dimensions")
        return None
    out = []
    for x in raw:
        if isinstance(x, bool) or not isinstance(x, (int, float, Decimal, Fraction)):
            errors.append(f"{where}: weight entry {x!r} is not an integer")
            return None
        if x != int(x):
            errors.append(f"{where}: weight entry {x!r} is not an integer")
            return None
        out.append(int(x))
    return tuple(out)


def _dimension_names(raw: Mapping[str, Any], errors: list[str]) -> tuple[str, ...]:
    dims = raw.get("dimensions")
    names = raw.get("dimension_names")
    if names is None and isinstance(dims, int):
        names = [f"w{i}" for i in range(dims)]
    if dims is None and isinstance(names, list):
        dims = len(names)
    if isinstance(dims, bool) or not isinstance(dims, int) or dims < 1:
        errors.append(f"dimensions must be a positive integer, got {dims!r}")
        return ()
    if not isinstance(names, list) or len(names) != dims:
        errors.append(f"dimension_names must list {dims} labels")
        return tuple(f"w{i}" for i in range(dims))
    if len(set(names)) != len(names):
        errors.append("dimension_names must be unique")
    return tuple(str(n) for n in names)


class _Dimensioned:
    dimension_names: tuple[str, ...]

    @property
    def dimensions(self) -> int:
        return len(self.dimension_names)

    def dim_index(self, dimension: int | str) -> int:
        """Resolve a dimension given by label or 0-based index."""
        if isinstance(dimension, str):
            try:
                return self.dimension_names.index(dimension)
            except ValueError:
                raise ValueError(
                    f"unknown dimension {dimension!r}; model has {list(self.dimension_names)}"
                ) from None
        if isinstance(dimension, bool) or not 0 <= dimension < self.dimensions:
            raise ValueError(f"dimension index {dimension!r} out of range 0..{self.dimensions - 1}")
        return int(dimension)


@dataclass(frozen=True)
class Action:
    name: str
    source: State
    weight: tuple[int, ...]
    # (successor, probability) pairs in the model's state order
    dist: tuple[tuple[State, Fraction], ...]

    def support(self) -> tuple[State, ...]:
        return tuple(s for s, _ in self.dist)


@dataclass(frozen=True, eq=False)
class WeightedMDP(_Dimensioned):
    states: tuple[State, ...]
    initial: State
    actions: tuple[Action, ...]
    dimension_names: tuple[str, ...]
    _by_state: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_state: dict = {s: {} for s in self.states}
        for a in self.actions:
            by_state[a.source][a.name] = a
        object.__setattr__(self, "_by_state", by_state)

    def available(self, state: State) -> tuple[Action, ...]:
        """Actions at ``state`` sorted by name."""
        return tuple(self._by_state[state].values())

    def action(self, state: State, name: str) -> Action:
        try:
            return self._by_state[state][name]
        except KeyError:
            raise KeyError(f"no action {name!r} at state {state!r}") from None

    def has_action(self, state: State, name: str) -> bool:
        return name in self._by_state.get(state, ())

    def state_index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def __eq__(self, other):
        if not isinstance(other, WeightedMDP):
            return NotImplemented
        return (self.states, self.initial, self.actions, self.dimension_names) == (
            other.states, other.initial, other.actions, other.dimension_names)

    def __hash__(self):
        return hash((self.states, self.initial, self.actions))


@dataclass(frozen=True)
class Edge:
    name: str
    source: State
    target: State
    weight: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class WeightedGame(_Dimensioned):
    states1: frozenset
    states2: frozenset
    initial: State
    edges: tuple[Edge, ...]
    dimension_names: tuple[str, ...]
    # declaration order of all states, used for deterministic tie-breaking
    order: tuple[State, ...] = ()
    _by_state: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.order:
            object.__setattr__(self, "order", tuple(sorted(self.states1 | self.states2, key=repr)))
        by_state: dict = {s: {} for s in self.order}
        for e in self.edges:
            by_state[e.source][e.name] = e
        object.__setattr__(self, "_by_state", by_state)

    @property
    def states(self) -> tuple[State, ...]:
        return self.order

    def owner(self, state: State) -> int:
        return 1 if state in self.states1 else 2

    def outgoing(self, state: State) -> tuple[Edge, ...]:
        return tuple(self._by_state[state].values())

    def edge(self, state: State, name: str) -> Edge:
        try:
            return self._by_state[state][name]
        except KeyError:
            raise KeyError(f"no edge {name!r} leaving {state!r}") from None

    def has_edge(self, state: State, name: str) -> bool:
        return name in self._by_state.get(state, ())

    def __eq__(self, other):
        if not isinstance(other, WeightedGame):
            return NotImplemented
        return (self.states1, self.states2, self.initial, self.edges, self.dimension_names,
                self.order) == (other.states1, other.states2, other.initial, other.edges,
                                other.dimension_names, other.order)

    def __hash__(self):
        return hash((self.initial, self.edges))


_MDP_KEYS = {"type", "dimensions", "dimension_names", "states", "initial", "actions"}
_GAME_KEYS = {"type", "dimensions", "dimension_names", "states", "initial", "players", "edges"}
_ACTION_KEYS = {"name", "source", "weight", "dist"}
_EDGE_KEYS = {"name", "source", "target", "weight"}


def _state_list(raw: Mapping[str, Any], errors: list[str]) -> list:
    states = raw.get("states")
    if not isinstance(states, list) or not states:
        errors.append("states must be a non-empty list")
        return []
    if len(set(states)) != len(states):
        errors.append("states must be unique")
    return list(dict.fromkeys(states))


def validate_mdp(raw: Mapping[str, Any]) -> WeightedMDP:
    """Build a canonical :class:`WeightedMDP` from a plain description.

    Raises :class:`ModelError` listing every violated invariant.
    """
    errors: list[str] = []
    if raw.get("type", "mdp") != "mdp":
        errors.append(f"type must be 'mdp', got {raw.get('type')!r}")
    unknown = set(raw) - _MDP_KEYS
    if unknown:
        errors.append(f"unknown keys: {sorted(unknown)}")
    names = _dimension_names(raw, errors)
    states = _state_list(raw, errors)
    known = set(states)
    initial = raw.get("initial")
    if initial not in known:
        errors.append(f"initial state {initial!r} is not a declared state")

    order = {s: i for i, s in enumerate(states)}
    actions: list[Action] = []
    seen: set = set()
    raw_actions = raw.get("actions")
    if not isinstance(raw_actions, list):
        errors.append("actions must be a list")
        raw_actions = []
    for k, ra in enumerate(raw_actions):
        if not isinstance(ra, Mapping):
            errors.append(f"action #{k}: must be an object")
            continue
        name, source = ra.get("name"), ra.get("source")
        where = f"action {name!r} at {source!r}"
        bad = set(ra) - _ACTION_KEYS
        if bad:
            errors.append(f"{where}: unknown keys {sorted(bad)}")
        if not isinstance(name, str) or not name:
            errors.append(f"action #{k}: name must be a non-empty string")
            continue
        if source not in known:
            errors.append(f"{where}: source is not a declared state")
            continue
        if (source, name) in seen:
            errors.append(f"{where}: duplicate action name at this state")
            continue
        seen.add((source, name))
        weight = _as_weight(ra.get("weight"), len(names), where, errors) if names else None
        dist_raw = ra.get("dist")
        if not isinstance(dist_raw, Mapping) or not dist_raw:
            errors.append(f"{where}: dist must be a non-empty map state -> probability")
            continue
        dist: dict = {}
        ok = True
        for succ, p in dist_raw.items():
            if succ not in known:
                errors.append(f"{where}: successor {succ!r} is not a declared state")
                ok = False
                continue
            try:
                q = to_fraction(p)
            except (ValueError, ZeroDivisionError):
                errors.append(f"{where}: probability {p!r} for {succ!r} is not a rational")
                ok = False
                continue
            if q < 0 or q > 1:
                errors.append(f"{where}: probability {render_fraction(q)} for {succ!r} outside [0,1]")
                ok = False
            elif q > 0:
                dist[succ] = q
        if not ok:
            continue
        total = sum(dist.values(), Fraction(0))
        if total != 1:
            errors.append(f"{where}: distribution sums to {render_fraction(total)}")
            continue
        if weight is None:
            continue
        ordered = tuple(sorted(dist.items(), key=lambda kv: order[kv[0]]))
        actions.append(Action(name, source, weight, ordered))

    with_actions = {a.source for a in actions} | {src for src, _ in seen}
    for s in states:
        if s not in with_actions:
            errors.append(f"state {s!r} has no available action")
    if errors:
        raise ModelError(errors)
    actions.sort(key=lambda a: (order[a.source], a.name))
    return WeightedMDP(tuple(states), initial, tuple(actions), names)


def validate_game(raw: Mapping[str, Any]) -> WeightedGame:
    """Build a canonical :class:`WeightedGame`; raises :class:`ModelError`."""
    errors: list[str] = []
    if raw.get("type", "game") != "game":
        errors.append(f"type must be 'game', got {raw.get('type')!r}")
    unknown = set(raw) - _GAME_KEYS
    if unknown:
        errors.append(f"unknown keys: {sorted(unknown)}")
    names = _dimension_names(raw, errors)
    players = raw.get("players")
    if not isinstance(players, Mapping) or set(players) - {"1", "2", 1, 2}:
        errors.append("players must map '1' and '2' to state lists")
        players = {}
    s1 = list(players.get("1", players.get(1, [])) or [])
    s2 = list(players.get("2", players.get(2, [])) or [])
    both = set(s1) & set(s2)
    for s in sorted(both, key=repr):
        errors.append(f"state {s!r} belongs to both players")
    if "states" in raw:
        states = _state_list(raw, errors)
        if set(states) != set(s1) | set(s2):
            missing = (set(s1) | set(s2)) ^ set(states)
            errors.append(f"states and player partition disagree on {sorted(missing, key=repr)}")
    else:
        states = list(dict.fromkeys(s1 + s2))
    if not states:
        errors.append("game has no states")
    known = set(states)
    initial = raw.get("initial")
    if initial not in known:
        errors.append(f"initial state {initial!r} is not a declared state")

    order = {s: i for i, s in enumerate(states)}
    edges: list[Edge] = []
    seen: set = set()
    raw_edges = raw.get("edges")
    if not isinstance(raw_edges, list):
        errors.append("edges must be a list")
        raw_edges = []
    for k, re_ in enumerate(raw_edges):
        if not isinstance(re_, Mapping):
            errors.append(f"edge #{k}: must be an object")
            continue
        src, dst = re_.get("source"), re_.get("target")
        name = re_.get("name", dst)
        where = f"edge {name!r} from {src!r}"
        bad = set(re_) - _EDGE_KEYS
        if bad:
            errors.append(f"{where}: unknown keys {sorted(bad)}")
        if src not in known or dst not in known:
            errors.append(f"{where}: endpoint {src if src not in known else dst!r} is not a declared state")
            continue
        if (src, name) in seen:
            errors.append(f"{where}: duplicate edge name at this state")
            continue
        seen.add((src, name))
        weight = _as_weight(re_.get("weight"), len(names), where, errors) if names else None
        if weight is not None:
            edges.append(Edge(str(name), src, dst, weight))
    sources = {src for src, _ in seen}
    for s in states:
        if s not in sources:
            errors.append(f"state {s!r} has no outgoing edge")
    if errors:
        raise ModelError(errors)
    edges.sort(key=lambda e: (order[e.source], e.name))
    return WeightedGame(frozenset(s1), frozenset(s2), initial, tuple(edges), names, tuple(states))


def mdp_to_dict(mdp: WeightedMDP) -> dict:
    return {
        "type": "mdp",
        "dimensions": mdp.dimensions,
        "dimension_names": list(mdp.dimension_names),
        "states": list(mdp.states),
        "initial": mdp.initial,
        "actions": [
            {
                "name": a.name,
                "source": a.source,
                "weight": list(a.weight),
                "dist": {s: render_fraction(p) for s, p in a.dist},
            }
            for a in mdp.actions
        ],
    }


def game_to_dict(game: WeightedGame) -> dict:
    return {
        "type": "game",
        "dimensions": game.dimensions,
        "dimension_names": list(game.dimension_names),
        "states": list(game.order),
        "initial": game.initial,
        "players": {
            "1": [s for s in game.order if s in game.states1],
            "2": [s for s in game.order if s in game.states2],
        },
        "edges": [
            {"name": e.name, "source": e.source, "target": e.target, "weight": list(e.weight)}
            for e in game.edges
        ],
    }


# --------------------------------------------------------------------------
# strategies

WILDCARD = "*"


@dataclass(frozen=True, eq=False)
class MooreStrategy:
    """Finite-memory, possibly randomized strategy.

    ``choice[(m, s)]`` is a tuple of ``(action_or_edge, probability)`` pairs.
    ``update[(m, s2)]`` gives the memory after observing successor ``s2``;
    the state ``"*"`` acts as a wildcard.  ``action_update[(m, a, s2)]``
    takes precedence and lets a randomized strategy remember which action
    it actually sampled.
    """

    memory: tuple[Memory, ...]
    initial_memory: Memory
    choice: Mapping[tuple[Memory, State], tuple[tuple[str, Fraction], ...]]
    update: Mapping[tuple[Memory, State], Memory]
    action_update: Mapping[tuple[Memory, str, State], Memory] = field(default_factory=dict)

    def __post_init__(self):
        errors = []
        mem = set(self.memory)
        if self.initial_memory not in mem:
            errors.append(f"initial memory {self.initial_memory!r} not among memory states")
        for key, dist in self.choice.items():
            if key[0] not in mem:
                errors.append(f"choice at {key!r}: unknown memory state")
            total = sum((p for _, p in dist), Fraction(0))
            if total != 1:
                errors.append(f"choice at {key!r}: distribution sums to {render_fraction(total)}")
            if any(p <= 0 for _, p in dist):
                errors.append(f"choice at {key!r}: probabilities must be positive")
        for table in (self.update, self.action_update):
            for key, m2 in table.items():
                if key[0] not in mem or m2 not in mem:
                    errors.append(f"update at {key!r}: unknown memory state")
        if errors:
            raise ModelError(errors)

    @property
    def is_pure(self) -> bool:
        return all(len(d) == 1 for d in self.choice.values())

    def distribution(self, memory: Memory, state: State) -> tuple[tuple[str, Fraction], ...]:
        try:
            return self.choice[(memory, state)]
        except KeyError:
            raise IncompleteStrategyError(
                f"strategy has no choice for memory {memory!r} at state {state!r}") from None

    def next_memory(self, memory: Memory, successor: State, action: str | None = None) -> Memory:
        if action is not None:
            m = self.action_update.get((memory, action, successor))
            if m is not None:
                return m
        m = self.update.get((memory, successor))
        if m is None:
            m = self.update.get((memory, WILDCARD))
        if m is None:
            raise IncompleteStrategyError(
                f"strategy has no memory update from {memory!r} on observing {successor!r}")
        return m

    def step(self, memory: Memory, current: State):
        """Return the action distribution at ``(memory, current)`` and the
        memory-update function for the observed successor."""
        dist = dict(self.distribution(memory, current))

        def after(successor: State, action: str | None = None) -> Memory:
            return self.next_memory(memory, successor, action)

        return dist, after

    @classmethod
    def memoryless(cls, choices: Mapping[State, Any], memory: Memory = "m0") -> "MooreStrategy":
        """Memoryless strategy from ``state -> action`` or ``state -> {action: p}``."""
        choice = {}
        for s, c in choices.items():
            if isinstance(c, Mapping):
                choice[(memory, s)] = tuple((a, to_fraction(p)) for a, p in c.items())
            else:
                choice[(memory, s)] = ((c, Fraction(1)),)
        return cls((memory,), memory, choice, {(memory, WILDCARD): memory})

    def as_memoryless_map(self) -> dict:
        """Inverse of :meth:`memoryless` for single-memory pure strategies."""
        if len(self.memory) != 1 or not self.is_pure:
            raise ValueError("strategy is not pure memoryless")
        return {s: d[0][0] for (_, s), d in self.choice.items()}


def strategy_step(strategy: MooreStrategy, memory: Memory, current: State):
    return strategy.step(memory, current)


def check_strategy_against(strategy: MooreStrategy, model: WeightedMDP | WeightedGame) -> None:
    """Every choice names an available action (MDP) or outgoing edge (game)."""
    errors = []
    for (m, s), dist in strategy.choice.items():
        if s not in set(model.states):
            errors.append(f"choice at ({m!r}, {s!r}): unknown state")
            continue
        for a, _ in dist:
            ok = model.has_action(s, a) if isinstance(model, WeightedMDP) else model.has_edge(s, a)
            if not ok:
                errors.append(f"choice at ({m!r}, {s!r}): {a!r} is not available")
    for key in list(strategy.update) + [(k[0], k[2]) for k in strategy.action_update]:
        if key[1] != WILDCARD and key[1] not in set(model.states):
            errors.append(f"update at {key!r}: unknown state")
    if errors:
        raise ModelError(errors)


def first_action_fallback(mdp: WeightedMDP) -> dict:
    """Lowest-named action at every state; used where a choice is irrelevant."""
    return {s: mdp.available(s)[0].name for s in mdp.states}

