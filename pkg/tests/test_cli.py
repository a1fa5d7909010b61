import json
import subprocess
import sys

import pytest

from sspgames import formats
from sspgames.cli import main

F = formats.fixture_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def solve(capsys, model, query, *extra):
    code, out, err = run(capsys, "solve", "--model", F(model), "--query", F(query), *extra)
    return code, (json.loads(out) if out else None), err


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_s1(capsys):
    code, doc, _ = solve(capsys, "commuting.json", "query-commuting-s1.json")
    assert code == 0 and doc["value"] == "33" and doc["verdict"] == "yes"
    assert doc["value_decimal"] == "33"
    assert doc["strategy"]["choice"][doc["strategy"]["initial_memory"]]["home"] == "car"


def test_s2_decimal_rendering(capsys):
    code, doc, _ = solve(capsys, "commuting.json", "query-commuting-s2.json")
    assert code == 0 and doc["probability"] == "999/1000" and doc["probability_decimal"] == "0.999"


def test_s3_game_and_mdp(capsys):
    code, doc, _ = solve(capsys, "commuting.json", "query-commuting-s3.json")
    assert code == 0 and doc["value"] == "45"
    code, doc, _ = solve(capsys, "shortest-path.json", "query-shortest-path-s3.json")
    assert doc["value"] == "30"


def test_s4(capsys):
    code, doc, _ = solve(capsys, "commuting.json", "query-commuting-s4.json")
    assert code == 0 and doc["worst_case"] == "58" and doc["expectation"] == "186671/5000"


def test_s5(capsys):
    code, doc, _ = solve(capsys, "bus-taxi.json", "query-bus-taxi-s5.json")
    assert code == 0 and doc["verdict"] == "yes" and len(doc["achieved"]) == 2


def test_no_and_infeasible_exit_codes(capsys, tmp_path):
    q = write(tmp_path, "q.json", {"problem": "S1", "target": ["work"], "dimension": "time", "l": 32})
    assert run(capsys, "solve", "--model", F("commuting.json"), "--query", q)[0] == 1
    q = write(tmp_path, "q.json", {"problem": "S4", "target": ["work"], "dimension": "time",
                                   "l1": 44, "l2": 50})
    code, out, _ = run(capsys, "solve", "--model", F("commuting.json"), "--query", q)
    assert code == 2 and json.loads(out)["verdict"] == "infeasible"


def test_evaluate_bike(capsys, tmp_path):
    q = write(tmp_path, "q.json", {"problem": "S1", "target": ["work"], "dimension": "time"})
    code, out, _ = run(capsys, "evaluate", "--model", F("commuting.json"), "--query", q,
                       "--strategy", F("strategy-bike.json"))
    assert code == 0 and json.loads(out)["value"] == "45"


def test_evaluate_s5_fixture(capsys):
    code, out, _ = run(capsys, "evaluate", "--model", F("bus-taxi.json"), "--query",
                       F("query-bus-taxi-s5.json"), "--strategy", F("strategy-bus-once-then-taxi.json"))
    assert code == 0 and json.loads(out)["achieved"] == ["997/1000", "7/10"]


def test_verify(capsys):
    args = ("verify", "--model", F("lawnmower.json"), "--query", F("query-lawnmower-verify.json"),
            "--strategy")
    code, out, _ = run(capsys, *args, F("strategy-lawnmower-controller.json"))
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "pass"
    assert doc["energy"]["battery"]["credit"] == "0" and doc["meanpayoff"]["max_mean"] == "25/6"
    code, out, _ = run(capsys, *args, F("strategy-lawnmower-fast-mow.json"))
    doc = json.loads(out)
    assert code == 1 and doc["energy"]["fuel"]["credit"] is None
    assert doc["energy"]["fuel"]["witness"][0] == doc["energy"]["fuel"]["witness"][-1]


def test_simulate_seed_override(capsys):
    args = ("simulate", "--model", F("commuting.json"), "--query", F("query-commuting-sim.json"),
            "--strategy", F("strategy-car.json"), "--runs", 2000)
    code, a, _ = run(capsys, *args, "--seed", 1)
    _, b, _ = run(capsys, *args, "--seed", 1)
    _, c, _ = run(capsys, *args, "--seed", 2)
    assert code == 0 and a == b != c
    doc = json.loads(a)
    assert doc["runs"] == 2000 and doc["seed"] == 1


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--model", F("commuting.json"), "--strategy", F("strategy-car.json"))
    doc = json.loads(out)
    assert code == 0 and doc["states"] == 7 and doc["strategy"] == "ok"
    code, out, _ = run(capsys, "validate", "--model", F("lawnmower.json"))
    assert json.loads(out)["type"] == "game"


def test_weight_length_error_names_action(capsys, tmp_path):
    bad = write(tmp_path, "m.json", {
        "type": "mdp", "dimensions": 2, "dimension_names": ["a", "b"], "states": ["s"], "initial": "s",
        "actions": [{"name": "loop", "source": "s", "weight": [1], "dist": {"s": "1"}}]})
    code, out, err = run(capsys, "validate", "--model", bad)
    assert code == 2 and out == "" and "loop" in err


def test_syntax_error_has_position(capsys, tmp_path):
    bad = tmp_path / "m.json"
    bad.write_text('{"type": "mdp",\n  "states": [}', encoding="utf-8")
    code, _, err = run(capsys, "validate", "--model", bad)
    assert code == 2 and "m.json:2:" in err


def test_unknown_state_in_strategy(capsys, tmp_path):
    s = write(tmp_path, "s.json", {"memory_states": ["m"], "initial_memory": "m",
                                   "choice": {"m": {"garage": "car"}}, "update": {"m": {"*": "m"}}})
    code, _, err = run(capsys, "evaluate", "--model", F("commuting.json"),
                       "--query", F("query-commuting-s1.json"), "--strategy", s)
    assert code == 2 and "garage" in err


def test_dimension_mismatch(capsys, tmp_path):
    q = write(tmp_path, "q.json", {"problem": "S1", "target": ["work"], "dimension": "cost"})
    code, _, err = run(capsys, "solve", "--model", F("commuting.json"), "--query", q)
    assert code == 2 and "cost" in err


def test_missing_flag(capsys):
    code, _, err = run(capsys, "solve", "--model", F("commuting.json"))
    assert code == 2 and "--query" in err


@pytest.mark.parametrize("model, query", [
    ("commuting.json", "query-commuting-s1.json"),
    ("commuting.json", "query-commuting-s2.json"),
    ("commuting.json", "query-commuting-s3.json"),
    ("commuting.json", "query-commuting-s4.json"),
    ("bus-taxi.json", "query-bus-taxi-s5.json"),
])
def test_emitted_strategy_reproduces(capsys, tmp_path, model, query):
    out = tmp_path / "result.json"
    code, _, _ = run(capsys, "solve", "--model", F(model), "--query", F(query), "--out", out)
    doc = json.loads(out.read_text())
    assert doc["strategy_file"] == str(tmp_path / "result.strategy.json")
    again_code, again, _ = run(capsys, "evaluate", "--model", F(model), "--query", F(query),
                               "--strategy", doc["strategy_file"])
    again = json.loads(again)
    assert again_code == code
    for key in ("value", "probability", "expectation", "worst_case", "achieved"):
        assert again.get(key) == doc.get(key)


def test_output_is_deterministic(capsys):
    args = ("solve", "--model", F("bus-taxi.json"), "--query", F("query-bus-taxi-s5.json"))
    assert run(capsys, *args) == run(capsys, *args)


def test_table_format(capsys):
    code, out, _ = run(capsys, "solve", "--model", F("commuting.json"),
                       "--query", F("query-commuting-s1.json"), "--format", "table")
    rows = dict(line.split(None, 1) for line in out.splitlines())
    assert rows["value"] == "33" and rows["verdict"] == "yes" and "memory states" in rows["strategy"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sspgames", "solve", "--model", str(F("commuting.json")),
                           "--query", str(F("query-commuting-s3.json"))], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "45"
