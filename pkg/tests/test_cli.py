from __future__ import annotations

import json
from pathlib import Path

import pytest

from icfeas.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_verdicts(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "p_2stic.json")
    assert code == 2
    rep = json.loads(out)
    assert rep["verdict"]["verdict"] == "RateThirdInfeasible"
    assert rep["verdict"]["subset"] == [2, 4, 5]
    assert run(capsys, "analyze", DATA / "p_pair.json")[0] == 0
    assert run(capsys, "analyze", DATA / "p_stic.json")[0] == 3


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "p_spic.json", "--text")
    assert code == 3
    assert "SPIC: [1, 2, 3, 4, 5]" in out and "verdict: Inconclusive" in out


def test_bad_inputs(capsys):
    for name in ("bad_json.json", "bad_invariant.json", "missing.json"):
        code, _, err = run(capsys, "analyze", DATA / name)
        assert code == 1 and err.startswith("error:")
    with pytest.raises(SystemExit):
        main(["analyze"])


def test_construct(capsys, tmp_path):
    out_file = tmp_path / "code.json"
    code, out, _ = run(capsys, "construct", DATA / "p_tri.json", "--seed", 7, "--out", out_file)
    assert code == 0 and out == ""
    d = json.loads(out_file.read_text())
    assert d["verified"] and d["L"] == 3 and d["q"] == 101 and d["seed"] == 7
    code, out, _ = run(capsys, "construct", DATA / "p_2stic.json")
    assert code == 5 and json.loads(out)["status"] == "NoQualifyingContraction"
    code, out, _ = run(capsys, "construct", DATA / "theorem5" / "fan6.json", "--q", 2, "--retries", 2)
    assert code == 4


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", DATA / "p_stic.json", "--subsets", "2,3,5")
    assert code == 0
    assert json.loads(out)["achievable_dims"] == [{"subset": [2, 3, 5], "dims": [1, 3]}]
    code, out, _ = run(capsys, "oracle", DATA / "p_pair.json")
    assert code == 0 and json.loads(out)["minrank"] == 2
    assert run(capsys, "oracle", DATA / "p_tri.json", "--L", 2)[0] == 2
    code, out, _ = run(capsys, "oracle", DATA / "p_2stic.json", "--L", 3, "--budget", 10)
    assert code == 3 and json.loads(out)["status"] == "BudgetExceeded"
    code, out, _ = run(capsys, "oracle", DATA / "p_pair.json", "--L", 2, "--timing")
    assert "wall_time_s" in json.loads(out)


def test_contract_and_dot(capsys):
    code, out, _ = run(capsys, "contract", DATA / "p_stic.json")
    d = json.loads(out)
    assert code == 0 and d["map"]["source_n"] == 9
    code, out, _ = run(capsys, "export-dot", DATA / "p_spic.json")
    assert code == 0 and out.count("shape=point") == 7


def test_output_is_repeatable(capsys):
    a = run(capsys, "analyze", DATA / "p_spic_chain.json")[1]
    b = run(capsys, "analyze", DATA / "p_spic_chain.json")[1]
    assert a == b
