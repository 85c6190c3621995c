import json

import pytest

from gamesec.cli import main
from gamesec.games import parse_sexp, validate_play, view
from gamesec.lattice import l4
from gamesec.types import parse_type


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_lattice_validate(capsys, tmp_path):
    assert run(capsys, "lattice", "validate", "l4.lat")[0] == 0
    bad = tmp_path / "bad.lat"
    bad.write_text("elements: bot a b\nbottom: bot\njoin: a b = a\njoin: b a = b\n")
    code, report = run_json(capsys, "lattice", "validate", str(bad))
    assert code == 1 and report["verdict"] == "fail"
    assert any("commutativity" in v for v in report["violations"])


def test_type_level(capsys):
    code, report = run_json(capsys, "type", "level", "--lattice", "l4.lat", "[a]X@bot/1 * [b]Y@bot/1")
    assert code == 0 and report["level"] == ["a", "b"]


def test_flow_check_no_flow(capsys):
    code, report = run_json(capsys, "flow", "check", "--lattice", "l4.lat",
                            "--from", "[a]D@bot/1", "--to", "[b]E@bot/1")
    assert code == 0 and report["verdict"] == "no-flow" and "witness" not in report


def test_flow_check_witness_revalidates(capsys):
    code, report = run_json(capsys, "flow", "check", "--from", "D@bot/1", "--to", "[a]E@bot/1",
                            "--context", "X@bot/1", "--witness")
    assert code == 0 and report["verdict"] == "flow-possible" and report["witness_valid"]
    lat = l4()
    v = view(parse_type(report["witness"]["game"], lat), lat, report["witness"]["bounds"]["copy_bound"])
    for play in report["witness"]["plays"]:
        assert validate_play(v, [parse_sexp(m) for m in play]) == []


def test_dcc_check_example(capsys):
    code, out, _ = run(capsys, "dcc", "check", "example1.dcc", "--lattice", "example1.lat")
    assert code == 0 and "x1 (x2 x3)" in out


def test_dcc_defaults_to_the_sibling_lattice(capsys):
    code, report = run_json(capsys, "dcc", "check", "example1.dcc")
    assert code == 0 and report["verdict"] == "pass"


def test_dcc_mutated_lattice_names_levels(capsys):
    code, report = run_json(capsys, "dcc", "check", "example1.dcc", "--lattice", "example1-mutated.lat")
    assert code == 1
    err = report["results"][0]
    assert err["error"] == "ProtectionError"
    assert {err["levels"]["required"], err["levels"]["found"]} == {"bob", "admin"}


def test_dcc_nocheck_reports_assumptions(capsys):
    code, report = run_json(capsys, "dcc", "nocheck", "example1.dcc", "--lattice", "example1.lat")
    first = report["results"][0]
    assert first["uses"] == ["x1", "x2", "x3"] and first["normal_form"] == "x1 (x2 x3)"
    # the non-interference report on x3 is part of the output either way
    assert report["results"][-1]["variable"] == "x3"


def test_dcc_run_denotes(capsys):
    code, report = run_json(capsys, "dcc", "run", "example1.dcc", "--lattice", "example1.lat", "--bounds", "2,8")
    assert code == 0
    st = report["results"][0]["strategy"]
    assert st["total"] and st["bounds"] == {"copy_bound": 2, "max_len": 8}


def test_trace(capsys):
    code, report = run_json(capsys, "trace", "id(X@bot/1)", "eta(a,X@bot/1)", "--bounds", "1,4")
    assert code == 0
    assert report["composite"]["game"] == "X@bot/1 -o [a]X@bot/1"
    assert report["interactions"][-1]["external"] == ["(B (q))", "(A (q) (q))", "(A (q) (a 0))", "(B (a 0))"]


def test_trace_from_file(capsys, tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"game": "X@bot/1 -o X@bot/1", "plays": [[], ["(B (q))", "(B (a 0))"]]}))
    code, report = run_json(capsys, "trace", f"@{f}", "id(X@bot/1)", "--bounds", "1,4")
    assert code == 0 and report["composite"]["plays"] == [[], ["(B (q))", "(B (a 0))"]]


def test_laws_single_suite_is_deterministic(capsys):
    a = run(capsys, "laws", "test", "--suite", "incomparable", "--format", "json")
    b = run(capsys, "laws", "test", "--suite", "incomparable", "--format", "json")
    assert a[0] == 0 and a == b
    assert json.loads(a[1])["suites"] == {"incomparable": {"checks": 12, "failures": 0}}


@pytest.mark.parametrize("argv", [
    ["dcc", "check", "missing.dcc"],
    ["type", "level", "X@"],
    ["laws", "test", "--bounds", "2,7"],
    ["laws", "test", "--suite", "nope"],
    ["trace", "nope(X@bot/1)", "id(X@bot/1)"],
    ["lattice"],
])
def test_usage_and_parse_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_budget_exhaustion_exits_2(capsys, monkeypatch):
    monkeypatch.setenv("GAMESEC_BUDGET_MS", "0.001")
    code, _, err = run(capsys, "laws", "test", "--suite", "category")
    assert code == 2 and "budget" in err
