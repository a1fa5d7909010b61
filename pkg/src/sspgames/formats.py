"""JSON files: models, strategies and queries.

Numbers with a fractional part are read as exact decimals, so ``0.7`` in
a file is exactly 7/10.  Rationals are written back as ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .model import (ModelError, MooreStrategy, WeightedGame, WeightedMDP, game_to_dict,
                    mdp_to_dict, render_fraction, to_fraction, validate_game, validate_mdp)
from .multi import PercentileConstraint
from .payoff import INFINITE, TruncatedSumSpec
from .sim import DEFAULT_HORIZON, SimConfig
from .verifier import MeanPayoffSpec, ObjectiveSpec


class FormatError(ValueError):
    """A file is not valid JSON or does not follow its format."""


def fixture_path(name: str) -> Path:
    """Path of a file shipped in ``sspgames/fixtures``."""
    return Path(str(resources.files("sspgames") / "fixtures" / name))


def read_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path, doc: Any) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


# --------------------------------------------------------------------------
# models


def model_from_dict(raw: Mapping) -> WeightedMDP | WeightedGame:
    if not isinstance(raw, Mapping):
        raise ModelError(["model must be a JSON object"])
    kind = raw.get("type")
    if kind == "mdp":
        return validate_mdp(raw)
    if kind == "game":
        return validate_game(raw)
    raise ModelError([f"type must be 'mdp' or 'game', got {kind!r}"])


def parse_model(path) -> WeightedMDP | WeightedGame:
    raw = read_json(path)
    try:
        return model_from_dict(raw)
    except ModelError as exc:
        raise ModelError([f"{path}: {e}" for e in exc.errors]) from None


def model_to_dict(model) -> dict:
    return mdp_to_dict(model) if isinstance(model, WeightedMDP) else game_to_dict(model)


# --------------------------------------------------------------------------
# strategies


def strategy_from_dict(raw: Mapping) -> MooreStrategy:
    """``choice`` maps memory -> state -> action name or {action: prob};
    ``update`` maps memory -> observed state (or ``"*"``) -> memory;
    the optional ``action_update`` maps memory -> action -> state -> memory."""
    if not isinstance(raw, Mapping):
        raise ModelError(["strategy must be a JSON object"])
    unknown = set(raw) - {"memory_states", "initial_memory", "choice", "update", "action_update"}
    if unknown:
        raise ModelError([f"strategy: unknown keys {sorted(unknown)}"])
    try:
        memory = tuple(raw["memory_states"])
        initial = raw["initial_memory"]
        choice = {}
        for m, per_state in raw["choice"].items():
            for s, c in per_state.items():
                if isinstance(c, str):
                    choice[(m, s)] = ((c, Fraction(1)),)
                else:
                    choice[(m, s)] = tuple((a, to_fraction(p)) for a, p in c.items())
        update = {(m, s): m2 for m, row in raw["update"].items() for s, m2 in row.items()}
        action_update = {(m, a, s): m2
                         for m, by_action in raw.get("action_update", {}).items()
                         for a, row in by_action.items() for s, m2 in row.items()}
    except KeyError as exc:
        raise ModelError([f"strategy: missing key {exc.args[0]!r}"]) from None
    except (AttributeError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ModelError([f"strategy: malformed entry ({exc})"]) from None
    return MooreStrategy(memory, initial, choice, update, action_update)


def strategy_to_dict(strategy: MooreStrategy) -> dict:
    choice: dict = {}
    for (m, s), dist in strategy.choice.items():
        if len(dist) == 1:
            value: Any = dist[0][0]
        else:
            value = {a: render_fraction(p) for a, p in dist}
        choice.setdefault(m, {})[s] = value
    update: dict = {}
    for (m, s), m2 in strategy.update.items():
        update.setdefault(m, {})[s] = m2
    doc = {
        "memory_states": list(strategy.memory),
        "initial_memory": strategy.initial_memory,
        "choice": choice,
        "update": update,
    }
    if strategy.action_update:
        au: dict = {}
        for (m, a, s), m2 in strategy.action_update.items():
            au.setdefault(m, {}).setdefault(a, {})[s] = m2
        doc["action_update"] = au
    return doc


def parse_strategy(path) -> MooreStrategy:
    raw = read_json(path)
    try:
        return strategy_from_dict(raw)
    except ModelError as exc:
        raise ModelError([f"{path}: {e}" for e in exc.errors]) from None


# --------------------------------------------------------------------------
# queries

PROBLEMS = ("S1", "S2", "S3", "S4", "S5", "verify", "simulate")
_QUERY_KEYS = {
    "S1": {"target", "dimension", "l"},
    "S2": {"target", "dimension", "l", "alpha"},
    "S3": {"target", "dimension", "l"},
    "S4": {"target", "dimension", "l1", "l2"},
    "S5": {"constraints"},
    "verify": {"objectives"},
    "simulate": {"sim"},
}


@dataclass(frozen=True)
class Query:
    problem: str
    params: dict


def _targets(value) -> list:
    if isinstance(value, str):
        return [value]
    if isinstance(value, list) and value:
        return value
    raise FormatError(f"target must be a state or a non-empty list of states, got {value!r}")


def _natural(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, Decimal)) or value != int(value) or value < 0:
        raise FormatError(f"{key} must be a natural number, got {value!r}")
    return int(value)


def query_from_dict(raw: Mapping, model) -> Query:
    """Check a query document against ``model`` and normalize its values."""
    if not isinstance(raw, Mapping):
        raise FormatError("query must be a JSON object")
    problem = raw.get("problem")
    if problem not in PROBLEMS:
        raise FormatError(f"problem must be one of {list(PROBLEMS)}, got {problem!r}")
    unknown = set(raw) - _QUERY_KEYS[problem] - {"problem"}
    if unknown:
        raise FormatError(f"{problem} query: unknown keys {sorted(unknown)}")
    p: dict = {}
    if problem in ("S1", "S2", "S3", "S4"):
        for key in ("target", "dimension"):
            if key not in raw:
                raise FormatError(f"{problem} query: missing {key!r}")
        p["target"] = _targets(raw["target"])
        model.dim_index(raw["dimension"])
        p["dimension"] = raw["dimension"]
        if problem == "S2":
            for key in ("l", "alpha"):
                if key not in raw:
                    raise FormatError(f"S2 query: missing {key!r}")
        if "l" in raw:
            p["l"] = _natural(raw["l"], "l") if problem == "S2" else to_fraction(raw["l"])
        if "alpha" in raw:
            p["alpha"] = to_fraction(raw["alpha"])
        if problem == "S4":
            for key in ("l1", "l2"):
                if key not in raw:
                    raise FormatError(f"S4 query: missing {key!r}")
            p["l1"] = _natural(raw["l1"], "l1")
            p["l2"] = to_fraction(raw["l2"])
    elif problem == "S5":
        items = raw.get("constraints")
        if not isinstance(items, list) or not items:
            raise FormatError("S5 query: constraints must be a non-empty list")
        p["constraints"] = [
            PercentileConstraint.of(model, _targets(c["target"]), c["dimension"],
                                    _natural(c["l"], "l"), to_fraction(c["alpha"]))
            for c in items]
    elif problem == "verify":
        p["objectives"] = objectives_from_dict(raw.get("objectives"), model)
    else:
        p["sim"] = raw.get("sim")
        sim_config_from_dict(p["sim"], model)  # validate early
    return Query(problem, p)


def objectives_from_dict(raw, model) -> ObjectiveSpec:
    if not isinstance(raw, Mapping):
        raise FormatError("objectives must be an object")
    unknown = set(raw) - {"energy", "meanpayoff", "buchi"}
    if unknown:
        raise FormatError(f"objectives: unknown keys {sorted(unknown)}")
    energy = tuple(raw.get("energy", ()))
    for d in energy:
        model.dim_index(d)
    mp = None
    if raw.get("meanpayoff") is not None:
        m = raw["meanpayoff"]
        model.dim_index(m["dimension"])
        mp = MeanPayoffSpec(m["dimension"], to_fraction(m["threshold"]), bool(m.get("strict", True)))
    buchi = None
    if raw.get("buchi") is not None:
        buchi = frozenset(_targets(raw["buchi"]))
        bad = buchi - set(model.states)
        if bad:
            raise FormatError(f"objectives: unknown Büchi states {sorted(bad)}")
    try:
        return ObjectiveSpec(energy, mp, buchi)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def sim_config_from_dict(raw, model, seed=None, runs=None) -> SimConfig:
    if not isinstance(raw, Mapping):
        raise FormatError("sim must be an object")
    unknown = set(raw) - {"runs", "seed", "horizon", "estimators"}
    if unknown:
        raise FormatError(f"sim: unknown keys {sorted(unknown)}")
    ests = raw.get("estimators")
    if not isinstance(ests, list) or not ests:
        raise FormatError("sim: estimators must be a non-empty list")
    specs = tuple(
        TruncatedSumSpec.of(model, _targets(e["target"]), e["dimension"],
                            None if e.get("l") is None else _natural(e["l"], "l"))
        for e in ests)
    return SimConfig(
        runs=int(runs if runs is not None else raw.get("runs", 100_000)),
        seed=int(seed if seed is not None else raw.get("seed", 0)),
        horizon=int(raw.get("horizon", DEFAULT_HORIZON)),
        estimators=specs,
    )


def parse_query(path, model) -> Query:
    raw = read_json(path)
    try:
        return query_from_dict(raw, model)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{path}: malformed query ({exc})") from None
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


# --------------------------------------------------------------------------
# result values


def render_value(value) -> str:
    if value is INFINITE:
        return "inf"
    return render_fraction(value)


def decimal_value(value) -> str:
    if value is INFINITE:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return format(float(value), ".10g")


def put_value(doc: dict, key: str, value) -> None:
    """Store an exact value and its decimal rendering side by side."""
    doc[key] = render_value(value)
    doc[f"{key}_decimal"] = decimal_value(value)
