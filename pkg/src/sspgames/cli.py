"""Command-line front end.

Exit codes: 0 when the answer is yes/pass, 1 for no/fail, 2 for an
infeasible query or any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import formats
from .bwc import Verdict, solve_bwc
from .chain import expected_truncated_sum, induce_chain, prob_ts_leq, worst_truncated_sum
from .formats import FormatError, Query, put_value
from .model import (IncompleteStrategyError, ModelError, MooreStrategy, WeightedGame,
                    WeightedMDP, check_strategy_against)
from .multi import solve_multi_percentile
from .payoff import INFINITE, TruncatedSumSpec
from .percentile import solve_percentile
from .sim import simulate
from .ssp import solve_expectation, solve_worstcase
from .verifier import VerificationReport, build_product, describe_path, verify

EXIT = {"yes": 0, "pass": 0, "no": 1, "fail": 1, "infeasible": 2, "error": 2}


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _threshold_verdict(value, query: Query) -> str:
    if "l" in query.params:
        return _yes(value is not INFINITE and value <= query.params["l"])
    return _yes(value is not INFINITE)


def _need_mdp(model, problem):
    if not isinstance(model, WeightedMDP):
        raise FormatError(f"{problem} needs an MDP model")


def run_query(model, query: Query) -> tuple[dict, MooreStrategy | None]:
    """Solve ``query`` on ``model``; returns the result document and the
    synthesized strategy (if any)."""
    p = query.params
    doc: dict = {"problem": query.problem}
    if query.problem == "S1":
        _need_mdp(model, "S1")
        res = solve_expectation(model, p["target"], p["dimension"])
        put_value(doc, "value", res.value)
        doc["verdict"] = _threshold_verdict(res.value, query)
        return doc, res.strategy
    if query.problem == "S2":
        _need_mdp(model, "S2")
        res = solve_percentile(model, p["target"], p["dimension"], p["l"], p["alpha"])
        put_value(doc, "probability", res.probability)
        doc["verdict"] = _yes(res.verdict)
        return doc, res.strategy
    if query.problem == "S3":
        res = solve_worstcase(model, p["target"], p["dimension"])
        put_value(doc, "value", res.value)
        doc["verdict"] = _threshold_verdict(res.value, query)
        return doc, res.strategy
    if query.problem == "S4":
        _need_mdp(model, "S4")
        res = solve_bwc(model, p["target"], p["dimension"], p["l1"], p["l2"])
        doc["verdict"] = res.verdict.value
        if res.verdict is not Verdict.INFEASIBLE:
            put_value(doc, "expectation", res.expectation)
            put_value(doc, "worst_case", res.worst_case)
        return doc, res.strategy
    if query.problem == "S5":
        _need_mdp(model, "S5")
        res = solve_multi_percentile(model, p["constraints"])
        doc["verdict"] = _yes(res.verdict)
        if res.verdict:
            doc["achieved"] = [formats.render_value(a) for a in res.achieved]
            doc["achieved_decimal"] = [formats.decimal_value(a) for a in res.achieved]
        return doc, res.strategy
    raise FormatError(f"{query.problem} queries need a strategy (use 'verify' or 'simulate')")


def verification_document(report: VerificationReport, product) -> dict:
    doc: dict = {"problem": "verify", "verdict": "pass" if report.passed else "fail",
                 "product_size": report.product_size}
    if report.energy:
        doc["energy"] = {
            name: {"ok": r.ok,
                   "credit": None if r.credit is None else str(r.credit),
                   "witness": describe_path(product, r.witness)}
            for name, r in report.energy.items()}
    if report.buchi is not None:
        doc["buchi"] = {"ok": report.buchi.ok, "cycle": describe_path(product, report.buchi.cycle)}
    if report.meanpayoff is not None:
        mp = {"ok": report.meanpayoff.ok, "cycle": describe_path(product, report.meanpayoff.cycle)}
        put_value(mp, "max_mean", report.meanpayoff.max_mean)
        doc["meanpayoff"] = mp
    return doc


def evaluate_strategy(model, strategy: MooreStrategy, query: Query) -> dict:
    """Exact values of a given strategy for the quantity named by ``query``."""
    check_strategy_against(strategy, model)
    p = query.params
    doc: dict = {"problem": query.problem, "mode": "evaluate"}
    if query.problem == "verify":
        if not isinstance(model, WeightedGame):
            raise FormatError("verify needs a game model")
        report = verify(model, strategy, p["objectives"])
        return verification_document(report, build_product(model, strategy)) | {"mode": "evaluate"}
    _need_mdp(model, query.problem)
    if query.problem == "S5":
        constraints = p["constraints"]
        stop = frozenset.intersection(*(c.target for c in constraints))
        chain = induce_chain(model, strategy, absorbing=stop)
        probs = [prob_ts_leq(chain, TruncatedSumSpec(c.target, c.dimension, c.bound))
                 for c in constraints]
        doc["achieved"] = [formats.render_value(x) for x in probs]
        doc["achieved_decimal"] = [formats.decimal_value(x) for x in probs]
        doc["verdict"] = _yes(all(x >= c.alpha for x, c in zip(probs, constraints)))
        return doc
    if query.problem == "simulate":
        raise FormatError("use the 'simulate' command for simulation queries")
    spec = TruncatedSumSpec.of(model, p["target"], p["dimension"])
    chain = induce_chain(model, strategy, absorbing=spec.target)
    if query.problem == "S1":
        value = expected_truncated_sum(chain, spec)
        put_value(doc, "value", value)
        doc["verdict"] = _threshold_verdict(value, query)
    elif query.problem == "S2":
        prob = prob_ts_leq(chain, TruncatedSumSpec(spec.target, spec.dimension, p["l"]))
        put_value(doc, "probability", prob)
        doc["verdict"] = _yes(prob >= p["alpha"])
    elif query.problem == "S3":
        value = worst_truncated_sum(chain, spec.target, spec.dimension)
        put_value(doc, "value", value)
        doc["verdict"] = _threshold_verdict(value, query)
    else:
        worst = worst_truncated_sum(chain, spec.target, spec.dimension)
        value = expected_truncated_sum(chain, spec)
        put_value(doc, "worst_case", worst)
        put_value(doc, "expectation", value)
        ok = worst is not INFINITE and worst <= p["l1"] and value <= p["l2"]
        doc["verdict"] = _yes(ok)
    return doc


def simulation_document(report) -> dict:
    return {
        "problem": "simulate",
        "verdict": "pass",
        "runs": report.runs,
        "seed": report.seed,
        "horizon": report.horizon,
        "estimates": [
            {"kind": e.kind, "bound": e.bound, "estimate": e.estimate, "sd": e.sd,
             "ci95": list(e.ci95), "samples": e.samples, "censored": e.censored}
            for e in report.estimates],
    }


# --------------------------------------------------------------------------
# rendering


def _flatten(doc, prefix=""):
    if isinstance(doc, dict):
        for k in sorted(doc):
            yield from _flatten(doc[k], f"{prefix}{k}.")
    elif isinstance(doc, list) and any(isinstance(x, (dict, list)) for x in doc):
        for i, x in enumerate(doc):
            yield from _flatten(x, f"{prefix}{i}.")
    else:
        value = " ".join(map(str, doc)) if isinstance(doc, list) else doc
        yield prefix[:-1], value


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return formats.dumps(doc)
    shown = {k: v for k, v in doc.items() if k != "strategy"}
    rows = list(_flatten(shown))
    width = max((len(k) for k, _ in rows), default=0)
    lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
    if "strategy" in doc:
        lines.append(f"{'strategy'.ljust(width)}  {len(doc['strategy']['memory_states'])} memory states")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# commands


def _emit(args, doc: dict, strategy: MooreStrategy | None = None) -> int:
    if strategy is not None:
        if args.out:
            path = Path(args.out).with_suffix(".strategy.json")
            formats.write_json(path, formats.strategy_to_dict(strategy))
            doc["strategy_file"] = str(path)
        else:
            doc["strategy"] = formats.strategy_to_dict(strategy)
    text = render(doc, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT[doc["verdict"]]


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise FormatError(f"{args.command} needs {', '.join(missing)}")


def cmd_validate(args) -> int:
    _require(args, "model")
    model = formats.parse_model(args.model)
    doc = {"verdict": "pass", "type": "mdp" if isinstance(model, WeightedMDP) else "game",
           "states": len(model.states), "dimensions": list(model.dimension_names)}
    if isinstance(model, WeightedMDP):
        doc["actions"] = len(model.actions)
    else:
        doc["edges"] = len(model.edges)
    if args.strategy:
        check_strategy_against(formats.parse_strategy(args.strategy), model)
        doc["strategy"] = "ok"
    return _emit(args, doc)


def cmd_solve(args) -> int:
    _require(args, "model", "query")
    model = formats.parse_model(args.model)
    query = formats.parse_query(args.query, model)
    doc, strategy = run_query(model, query)
    return _emit(args, doc, strategy)


def cmd_evaluate(args) -> int:
    _require(args, "model", "query", "strategy")
    model = formats.parse_model(args.model)
    query = formats.parse_query(args.query, model)
    strategy = formats.parse_strategy(args.strategy)
    return _emit(args, evaluate_strategy(model, strategy, query))


def cmd_verify(args) -> int:
    _require(args, "model", "query", "strategy")
    model = formats.parse_model(args.model)
    query = formats.parse_query(args.query, model)
    if query.problem != "verify":
        raise FormatError(f"verify expects a 'verify' query, got {query.problem!r}")
    return _emit(args, evaluate_strategy(model, formats.parse_strategy(args.strategy), query))


def cmd_simulate(args) -> int:
    _require(args, "model", "query", "strategy")
    model = formats.parse_model(args.model)
    _need_mdp(model, "simulate")
    query = formats.parse_query(args.query, model)
    if query.problem != "simulate":
        raise FormatError(f"simulate expects a 'simulate' query, got {query.problem!r}")
    config = formats.sim_config_from_dict(query.params["sim"], model, args.seed, args.runs)
    strategy = formats.parse_strategy(args.strategy)
    check_strategy_against(strategy, model)
    return _emit(args, simulation_document(simulate(model, strategy, config)))


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "evaluate": cmd_evaluate,
            "simulate": cmd_simulate, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sspgames", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", help="model file (JSON)")
        p.add_argument("--query", help="query file (JSON)")
        p.add_argument("--strategy", help="strategy file (JSON)")
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--seed", type=int, help="override the simulation seed")
        p.add_argument("--runs", type=int, help="override the number of simulation runs")
        p.add_argument("--format", choices=("json", "table"), default="json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ModelError, FormatError, IncompleteStrategyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["error"]


if __name__ == "__main__":
    sys.exit(main())
