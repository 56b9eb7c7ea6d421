import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from mcgk.cli import SCHEMA_VERSION, main

CASES = json.loads((Path(__file__).parent / "golden" / "cli_cases.json").read_text())
SCHEMA = json.loads(resources.files("mcgk").joinpath("data", "report.schema.json").read_text())


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("case", CASES, ids=[" ".join(c["argv"]) or "<empty>" for c in CASES])
def test_golden_exit_codes(case, capsys):
    code, out, err = run(case["argv"], capsys)
    assert code == case["exit"]
    for s in case["text"]:
        assert s in out
    if code == 2:
        assert "usage" in err


@pytest.mark.parametrize("case", [c for c in CASES if c["exit"] != 2],
                         ids=[" ".join(c["argv"]) for c in CASES if c["exit"] != 2])
def test_json_reports_validate_and_roundtrip(case, capsys):
    code, out, _ = run(case["argv"] + ["--json"], capsys)
    assert code == case["exit"]
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["schema_version"] == SCHEMA_VERSION
    assert report["command"] == case["argv"][0]
    assert json.loads(json.dumps(report)) == report


def test_text_and_json_agree_on_torsion(capsys):
    _, text, _ = run(["torsion", "--genus", "1", "--punctures", "2"], capsys)
    _, js, _ = run(["torsion", "--genus", "1", "--punctures", "2", "--json"], capsys)
    orders = json.loads(js)["result"]["orders"]
    assert "{" + ", ".join(map(str, orders)) + "}" in text


def test_text_and_json_agree_on_vc_list(capsys):
    _, text, _ = run(["vc-list", "--genus", "1", "--punctures", "3"], capsys)
    _, js, _ = run(["vc-list", "--genus", "1", "--punctures", "3", "--json"], capsys)
    labels = [s["label"] for s in json.loads(js)["result"]["shapes"]]
    assert "{" + ", ".join(labels) + "}" in text


def test_k_report_json_payload(capsys):
    _, js, _ = run(["k-report", "--genus", "1", "--punctures", "1", "--json"], capsys)
    prof = json.loads(js)["result"]["profile"]
    assert prof["K_-1"]["text"] == "Z"
    assert all(prof[k]["text"] == "0" for k in ("Wh", "K0~", "K_-2"))
    assert json.loads(js)["citations"]


def test_fic_json_citations(capsys):
    _, js, _ = run(["fic-derive", "--goal", "FIC(SL2Z)", "--json"], capsys)
    rep = json.loads(js)
    assert rep["result"]["derived"] and any("[BFJP]" in c for c in rep["citations"])


def test_custom_kb_flag(tmp_path, capsys):
    path = tmp_path / "kb.json"
    path.write_text(json.dumps({"facts": [{"predicate": "FIC", "args": ["PureMCG(3,0,0)"],
                                           "cite": "hypothetical"}]}))
    code, out, _ = run(["fic-derive", "--goal", "FIC(PureMCG(3,0,0))", "--kb", str(path)], capsys)
    assert code == 0 and "hypothetical" in out
    path.write_text("{not json")
    code, _, err = run(["fic-derive", "--goal", "FIC(SL2Z)", "--kb", str(path)], capsys)
    assert code == 2 and "line 1" in err


def test_env_kb_override(tmp_path, monkeypatch, capsys):
    path = tmp_path / "kb.json"
    path.write_text("")
    monkeypatch.setenv("MCGK_KB", str(path))
    code, _, _ = run(["fic-derive", "--goal", "FIC(SL2Z)"], capsys)
    assert code == 1


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "mcgk.cli", "torsion", "--genus", "1", "--punctures", "5"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "{1}" in out.stdout
