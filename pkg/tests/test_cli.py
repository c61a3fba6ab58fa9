import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from posetchains.cli import main


def schema(name):
    return json.loads(resources.files("posetchains").joinpath("schemas", f"{name}.json").read_text())


def run(capsys, *argv, schema_name=None):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    payload = None
    if out.lstrip().startswith("{"):
        payload = json.loads(out)
        if schema_name:
            jsonschema.validate(payload, schema(schema_name))
    return code, payload, out


@pytest.fixture
def fixture_file(tmp_path, capsys):
    def make(name, *extra):
        path = tmp_path / f"{name}.json"
        code, doc, _ = run(capsys, "fixture", name, *extra, "--out", path)
        assert code == 0
        jsonschema.validate(json.loads(path.read_text()), schema("document"))
        return path

    return make


def test_validate_fixture(capsys, fixture_file):
    code, rep, _ = run(capsys, "validate", fixture_file("fig1"), schema_name="validate")
    assert code == 0 and rep["valid"]
    assert rep["up_rule"]["valid"] and rep["down_rule"]["valid"]


def test_validate_perturbed(capsys, fixture_file, tmp_path):
    doc = json.loads(fixture_file("fig1").read_text())
    for e in doc["up_rule"]:
        if (e["from"], e["to"]) == ("l", "a"):
            e["p"] = 0.5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, rep, _ = run(capsys, "validate", bad, schema_name="validate")
    assert code == 1 and not rep["valid"]
    assert rep["up_rule"]["row_deviations"] == [{"element": "l", "deviation": pytest.approx(-0.25)}]


def test_malformed_input(capsys, tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    assert main(["validate", str(p)]) == 2
    assert main(["validate", str(tmp_path / "missing.json")]) == 2
    p.write_text(json.dumps({"levels": [["a"], ["b"]]}))
    assert main(["validate", str(p)]) == 1
    # parses, but names an element that does not exist: a semantic error
    p.write_text(json.dumps({"levels": [["a"], ["b"]], "up_rule": [{"from": "a", "to": "zz", "p": 1}]}))
    assert main(["validate", str(p)]) == 1


def test_rational_strings_accepted(capsys, tmp_path):
    p = tmp_path / "q.json"
    p.write_text(json.dumps({
        "levels": [["a"], ["b", "c"]],
        "up_rule": [{"from": "a", "to": "b", "p": "1/3"}, {"from": "a", "to": "c", "p": "2/3"}],
    }))
    code, rep, _ = run(capsys, "validate", p, schema_name="validate")
    assert code == 0 and rep["valid"]


def test_compat_fig2(capsys, fixture_file):
    code, rep, _ = run(capsys, "compat", fixture_file("fig2"), schema_name="compat")
    assert code == 0
    assert rep["weak"] is True and rep["strong"] is False
    assert rep["residuals"]["balance"] == pytest.approx(0.25, abs=1e-12)
    assert main(["compat", str(fixture_file("fig2")), "--strong"]) == 1


def test_compat_fig4_strong(capsys, fixture_file):
    code, rep, _ = run(capsys, "compat", fixture_file("fig4"), "--strong", schema_name="compat")
    assert code == 0 and rep["weak"] and rep["strong"]


def test_compat_fig1_stationary_pairs_disagree(capsys, fixture_file):
    code, rep, _ = run(capsys, "compat", fixture_file("fig1"), schema_name="compat")
    assert code == 1 and rep["weak"] is False


def test_compat_fig5_user_sequence(capsys, tmp_path, fixture_file):
    doc = json.loads(fixture_file("fig5").read_text())
    doc["up_rule"] = [
        {"from": "0hat", "to": "s1", "p": 0.5}, {"from": "0hat", "to": "s2", "p": 0.5},
        {"from": "s1", "to": "1hat", "p": 1}, {"from": "s2", "to": "1hat", "p": 1},
    ]
    doc["sequence"] = [{"0hat": 1}, {"s1": "1/4", "s2": "3/4"}, {"1hat": 1}]
    p = tmp_path / "fig5.json"
    p.write_text(json.dumps(doc))
    code, rep, _ = run(capsys, "compat", p, "--sequence", "file", schema_name="compat")
    assert code == 1 and rep["weak"] is False
    assert main(["compat", str(fixture_file("fig5")), "--sequence", "file"]) == 1


def test_construct_down_round_trip(capsys, fixture_file, tmp_path):
    out = tmp_path / "built.json"
    code, _, _ = run(capsys, "construct-down", fixture_file("fig1"), "--start", "b", "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, schema("document"))
    assert main(["validate", str(out)]) == 0
    capsys.readouterr()
    code, rep, _ = run(capsys, "compat", out, "--sequence", "file", "--strong", schema_name="compat")
    assert code == 0 and rep["strong"]
    m = {e["to"]: e["p"] for e in doc["down_rule"] if e["from"] == "m"}
    assert m == pytest.approx({"l": 0.175 / 0.295, "r": 0.12 / 0.295})


def test_construct_down_nd_const(capsys, fixture_file, tmp_path):
    src = fixture_file("nd-const", "--nu", "0.4,0.6", "--n-max", 8)
    out = tmp_path / "nd.json"
    assert main(["construct-down", str(src), "--start", "0,0", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    for e in doc["down_rule"]:
        x = [int(t) for t in e["from"].split(",")]
        y = [int(t) for t in e["to"].split(",")]
        i = next(k for k in range(2) if x[k] != y[k])
        assert e["p"] == pytest.approx(x[i] / sum(x), abs=1e-12)


def test_young_commands(capsys):
    code, rep, _ = run(capsys, "young", "--mu", 0.3, "exact-dist", "--level", 3, schema_name="young")
    assert code == 0
    assert rep["distribution"] == pytest.approx({"3": 0.49, "2,1": 0.42, "1,1,1": 0.09})
    code, rep, _ = run(capsys, "young", "--mu", 0.3, "stationary", "--level", 3, schema_name="young")
    assert code == 0 and rep["max_deviation"] < 1e-12
    code, _, out = run(capsys, "young", "shape", "--partition", "4,2,1", "--a_n", 2, "--grid", "0:2:1")
    assert code == 0 and out.splitlines()[0] == "x,y"
    code, rep, _ = run(capsys, "young", "--mu", 1.5, "exact-dist", "--level", 3)
    assert code == 1


def test_nd_commands(capsys):
    code, rep, _ = run(capsys, "nd", "--d", 3, "uniform-check", "--n", 6, schema_name="nd")
    assert code == 0 and rep["uniform"]
    code, rep, _ = run(capsys, "nd", "--d", 2, "decay", "--n-max", 6, "--format", "json", schema_name="nd")
    assert rep["decay"] == pytest.approx({"2": 1.0, "3": 0.5, "4": 0.5, "5": 0.375, "6": 0.375})
    assert main(["nd", "--d", "3", "decay", "--n-max", "5"]) == 1
    code, rep, _ = run(capsys, "nd", "--d", 3, "limit-point", "--nu", "0.2,0.3,0.5", "--steps", 1000,
                       "--replicas", 20, "--seed", 1, schema_name="nd")
    assert code == 0 and rep["max_deviation"] < 0.05


def test_random_commands_need_seed(capsys, fixture_file):
    assert main(["simulate", "up", str(fixture_file("fig1")), "--start", "b", "--target-rank", "2"]) == 2
    assert main(["nd", "--d", "2", "limit-point", "--nu", "0.5,0.5", "--steps", "10"]) == 2


def test_simulate_commands(capsys, fixture_file):
    f1 = fixture_file("fig1")
    code, rep, _ = run(capsys, "simulate", "up", f1, "--start", "b", "--target-rank", 2,
                       "--replicas", 1000, "--seed", 3, "--format", "json", schema_name="simulate")
    assert code == 0 and set(rep["distribution"]) == {"a", "m", "c"}
    code, rep, _ = run(capsys, "simulate", "ud", fixture_file("fig4"), "--level", 1, "--replicas", 200,
                       "--seed", 3, "--format", "json", schema_name="simulate")
    assert code == 0 and sum(rep["distribution"].values()) == pytest.approx(1.0)
    code, rep, _ = run(capsys, "simulate", "young-up", "--mu", 0.3, "--level", 4, "--replicas", 100,
                       "--seed", 3, "--format", "json", schema_name="simulate")
    assert code == 0
    code, rep, _ = run(capsys, "simulate", "shape", "--n", 400, "--replicas", 10, "--seed", 3,
                       "--format", "json", schema_name="simulate")
    assert code == 0 and rep["a_n"] == pytest.approx(20.0)


def test_byte_reproducible(fixture_file):
    f1 = str(fixture_file("fig1"))
    argv = [sys.executable, "-m", "posetchains.cli", "simulate", "up", f1, "--start", "b",
            "--target-rank", "2", "--replicas", "500", "--seed", "42"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


def test_fixture_young_document(capsys):
    code, doc, _ = run(capsys, "fixture", "young", "--n-max", 4, "--mu", 0.5, schema_name="document")
    assert code == 0 and len(doc["levels"]) == 4
