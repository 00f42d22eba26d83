import json
import subprocess
import sys
from fractions import Fraction

import pytest

from densest_lab.cli import main
from densest_lab.graph import Graph, Witness
from densest_lab.instances import load_instance


def run(*args, cwd=None):
    proc = subprocess.run(
        [sys.executable, "-m", "densest_lab", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def k4(tmp_path):
    path = tmp_path / "k4.graph"
    Graph.complete(4).save(path)
    return path


def test_solve_brute_k4(k4):
    code, out, _ = run("solve", k4, "--alg", "brute", "--k", "2")
    assert code == 0 and out.splitlines()[0] == "3/2"


@pytest.mark.parametrize("alg", ["flow", "anchored", "xp", "peel3", "approx2"])
def test_solve_all_algorithms(k4, alg, capsys):
    assert main(["solve", str(k4), "--alg", alg, "--k", "2"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "3/2"


def test_witness_out(k4, tmp_path, capsys):
    wpath = tmp_path / "w.txt"
    assert main(["solve", str(k4), "--alg", "flow", "--witness-out", str(wpath)]) == 0
    assert Witness.load(wpath).vertices == (0, 1, 2, 3)


def test_decimal_rejected(tmp_path):
    code, _, err = run("plan", "--theorem", "1", "--eps", "0.5")
    assert code == 2 and "p/q" in err


def test_malformed_graph_exit_2(tmp_path):
    bad = tmp_path / "bad.graph"
    bad.write_text("3 1\n0 0\n")
    code, _, err = run("solve", bad)
    assert code == 2 and err.startswith("error:")


def test_budget_exit_3(tmp_path, capsys):
    path = tmp_path / "g.graph"
    Graph.cycle(14).save(path)
    assert main(["--budget", "1000", "solve", str(path), "--alg", "brute", "--k", "3"]) == 3


def test_plan_output(capsys):
    assert main(["plan", "--theorem", "1", "--eps", "1/1"]) == 0
    out = capsys.readouterr().out
    assert f"lambda={20 ** 16}" in out and "GapDALkS(lambda=1/2)" in out
    assert main(["plan", "--theorem", "3", "--eps", "1/2", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["stages"][0]["params"]["t"] == 4


def test_reduce_solve_verify_chain(tmp_path, capsys):
    gpath = tmp_path / "g.graph"
    assert main(["gen", "--model", "planted-clique", "--n", "12", "--k", "10", "--p", "1/2", "--seed", "3", "-o", str(gpath)]) == 0
    wsrc = tmp_path / "clique.w"
    Witness(tuple(range(10))).save(wsrc)
    inst = tmp_path / "inst.json"
    assert main(["reduce", str(gpath), "--rule", "clique2dalks", "--k", "10", "--out", str(inst), "--witness", str(wsrc)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["derived"]["k_prime"] == 65 and record["derived"]["alpha"] == "27/13"
    assert main(["solve", str(inst), "--alg", "structured", "--k", "65"]) == 0
    assert Fraction(capsys.readouterr().out.split()[0]) >= Fraction(27, 13)
    assert main(["verify", str(inst), "--witness", str(inst.with_suffix(".witness"))]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["valid"] and verdict["objective"] == "27/13"
    short = tmp_path / "short.w"
    Witness(tuple(range(20))).save(short)
    assert main(["verify", str(inst), "--witness", str(short)]) == 1
    assert json.loads(capsys.readouterr().out)["reason"].startswith("size")


def test_reduce_dksh2dalks_scaled(tmp_path, capsys):
    hpath = tmp_path / "h.hyper"
    hpath.write_text("4 2 2\n0 1\n2 3\n")
    out = tmp_path / "gadget.json"
    code = main([
        "reduce", str(hpath), "--rule", "dksh2dalks", "--k", "2", "--ell", "1", "--eps", "1/1",
        "--scale-c1", "1", "--scale-c2", "2", "--scale-x", "3", "--out", str(out),
    ])
    assert code == 0
    inst = load_instance(out)
    assert not inst.faithful and inst.carrier.n_vertices == 3 + 4 + 4


def test_reduce_relax_chain(tmp_path, capsys):
    gpath = tmp_path / "c5.graph"
    Graph.cycle(5).save(gpath)
    out = tmp_path / "relaxed.json"
    assert main(["reduce", str(gpath), "--rule", "relax", "--k", "3", "--ell", "2", "--lambda", "80/1", "--gamma", "1/1", "--out", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["derived"]["source_lambda"] == "160"
    nxt = tmp_path / "hyper.json"
    assert main(["reduce", str(out), "--rule", "dks2dksh", "--out", str(nxt)]) == 0
    assert load_instance(nxt).carrier.s == 5


def test_selftest_subset():
    code, out, _ = run("selftest", "--suite", "reductions", "--suite", "peeling")
    assert code == 0 and out.strip().endswith("passed")
    assert "FAIL" not in out


def test_manifest_and_replay(tmp_path):
    g = tmp_path / "g.graph"
    m1 = tmp_path / "gen.json"
    code, _, _ = run("--manifest", m1, "gen", "--n", "10", "--p", "1/2", "--seed", "1", "-o", g)
    assert code == 0
    doc = json.loads(m1.read_text())
    assert doc["command"] == "gen" and doc["seed"] == 1 and doc["params"]["p"] == "1/2"
    first = g.read_bytes()
    code, out, _ = run("replay", m1)
    assert code == 0 and "identical" in out
    assert g.read_bytes() == first

    m2 = tmp_path / "solve.json"
    run("--manifest", m2, "solve", g, "--alg", "flow")
    code, out, _ = run("replay", m2)
    assert code == 0 and "identical" in out


def test_replay_detects_tampering(tmp_path):
    g = tmp_path / "g.graph"
    m = tmp_path / "gen.json"
    run("--manifest", m, "gen", "--n", "8", "--seed", "2", "-o", g)
    doc = json.loads(m.read_text())
    doc["stdout_sha256"] = "0" * 64
    m.write_text(json.dumps(doc))
    code, out, _ = run("replay", m)
    assert code == 4 and "mismatch" in out


def test_gen_is_deterministic(capsys):
    assert main(["gen", "--n", "10", "--p", "1/2", "--seed", "1"]) == 0
    a = capsys.readouterr().out
    assert main(["gen", "--n", "10", "--p", "1/2", "--seed", "1"]) == 0
    assert capsys.readouterr().out == a
    assert Graph.loads(a).dumps() == a
