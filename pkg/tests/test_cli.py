import json
from pathlib import Path

import pytest

from mrflist.cli import main

DATA = Path(__file__).resolve().parents[1] / "data"
T1 = str(DATA / "t1.trace")
UPD = str(DATA / "updates.trace")
RULES = str(DATA / "rules.csv")
PACKETS = str(DATA / "packets.csv")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_det_row(capsys):
    code, out, _ = run(capsys, "run", "--trace", T1)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("trial,t,request,access_cost,rearrangement_cost")
    assert lines[1].split(",")[:5] == ["0", "1", "access c", "3", "1"]


def test_run_rand_trials(capsys):
    code, out, err = run(capsys, "run", "--trace", UPD, "--alg", "rand", "--trials", "4", "--seed", "3")
    assert code == 0
    assert {line.split(",")[0] for line in out.splitlines()[1:]} == {"0", "1", "2", "3"}
    assert "mean=" in err and "min=" in err and "max=" in err


def test_run_zero_trials(capsys):
    code, _, err = run(capsys, "run", "--trace", T1, "--alg", "rand", "--trials", "0")
    assert code == 2 and "trials" in err


def test_bad_trace_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.trace"
    bad.write_text("nodes a b\nedge b a\ninit b a\n")
    assert run(capsys, "run", "--trace", str(bad))[0] == 2
    assert run(capsys, "run", "--trace", str(tmp_path / "missing"))[0] == 2


def test_jsonl(capsys):
    code, out, _ = run(capsys, "run", "--trace", T1, "--with-opt", "--format", "jsonl")
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows[0]["access_cost"] == 3 and rows[0]["inversions_vs_opt"] is not None


def test_opt(capsys):
    code, out, err = run(capsys, "opt", "--trace", UPD)
    assert code == 0 and "opt_total=13" in err
    assert out.splitlines()[-1].endswith(",13")


def test_ratio(capsys):
    code, out, _ = run(capsys, "ratio", "--trace", T1, "--alg", "rand", "--exact-expectation")
    assert out.splitlines()[1].split(",")[-1] == "1"
    code, out, _ = run(capsys, "ratio", "--trace", T1, "--alg", "rand", "--trials", "20")
    assert out.splitlines()[1].split(",")[-1] == "0"


def test_gen_round_trips_through_run(tmp_path, capsys):
    out = tmp_path / "g.trace"
    assert run(capsys, "gen", "transitive-random", "--n", "4", "--future", "2", "--update-mix", "0.3",
               "--length", "10", "--seed", "9", "--out", str(out))[0] == 0
    assert run(capsys, "run", "--trace", str(out), "--alg", "rand", "--with-opt")[0] == 0
    code, text, _ = run(capsys, "gen", "quadratic-insert", "--n", "4")
    assert "insert v5 before=v3,v4 after=v1,v2" in text


def test_pkt(capsys):
    code, out, err = run(capsys, "pkt", "extract", "--rules", RULES)
    assert code == 0 and "transitive=false" in err
    assert sorted(out.splitlines()[1:]) == sorted(["x,1", "x,2", "x,3", "4,x", "5,x", "6,x"])
    code, out, _ = run(capsys, "pkt", "classify", "--rules", RULES, "--packets", PACKETS)
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert rows[0][2:5] == ["1", "ACCEPT", "1"]
    assert rows[1][2:4] == ["x", "DENY"]
    assert rows[3][3] == "DEFAULT"


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "rule-table")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "verify", "set-relations", "--trials", "50")
    assert code == 0


def test_verify_violation_exit_1(capsys, monkeypatch):
    from mrflist import cli, verify

    def broken(args):
        rep = verify.CheckReport("broken")
        rep.fail("witness-here")
        return [rep]

    monkeypatch.setitem(cli.SUITES, "rule-table", broken)
    code, out, _ = run(capsys, "verify", "rule-table")
    assert code == 1 and "FAIL" in out and "witness-here" in out


@pytest.mark.parametrize("argv", [
    ["run", "--trace", T1, "--alg", "rand", "--trials", "3", "--with-opt"],
    ["run", "--trace", UPD, "--alg", "rand", "--trials", "3", "--seed", "11", "--format", "jsonl"],
    ["opt", "--trace", UPD],
    ["ratio", "--trace", UPD, "--alg", "rand", "--trials", "30", "--seed", "5"],
    ["gen", "random", "--n", "5", "--length", "20", "--seed", "4", "--update-mix", "0.2", "--future", "2"],
    ["pkt", "classify", "--rules", RULES, "--packets", PACKETS, "--alg", "rand", "--seed", "2"],
    ["verify", "rand-events", "--trials", "20", "--seed", "1"],
])
def test_byte_reproducible(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
