from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from toric_alpha.catalog import catalog, entry_from_json, lookup
from toric_alpha.cli import parse_group_spec, run
from toric_alpha.invariants import alpha_kG, alpha_km, star_p_check
from toric_alpha.symmetry import FiniteGroup, automorphism_group


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def call_json(capsys, *argv):
    code, out, _ = call(capsys, *argv)
    return code, json.loads(out)


def test_alpha_full_group(capsys):
    code, data = call_json(capsys, "alpha", "p2", "--group", "full-aut")
    assert code == 0
    assert data["value"] == "1"
    assert data["glct_kG"] == data["value"] == data["orbit_value"]
    assert data["group_order"] == 6
    assert data["path"] == "vertex-formula"


def test_alpha_km_example(capsys):
    code, data = call_json(capsys, "alpha-km", "p2", "--k", "2", "--m", "2")
    assert code == 0
    assert data["value"] == "2/5"
    assert data["m"] == 2 and data["k"] == 2
    assert len(data["witness"]) == 2


def test_alpha_km_no_subspace(capsys):
    code, data = call_json(capsys, "alpha-km", "p2", "--k", "1", "--m", "11")
    assert code == 0
    assert data["value"] is None
    assert data["outcome"] == "no-invariant-subspace"


def test_star_p(capsys):
    code, data = call_json(capsys, "star-p", "p1xp1")
    assert code == 0 and data["holds"] is False
    code, data = call_json(capsys, "star-p", "p2")
    assert data["holds"] is True and data["flat_edge"] is None


def test_check(capsys):
    code, data = call_json(capsys, "check", "dp3")
    assert code == 0
    assert data["smooth"] and data["integral"]
    assert data["aut_order"] == 12


def test_check_reports_singular_fan(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "dim": 2, "rays": [[1, 0], [0, 1], [-1, -2]]}))
    code, data = call_json(capsys, "check", str(path))
    assert code == 0
    assert data["smooth"] is False
    assert data["smoothness_witness"]["determinant"] == "-2"


def test_stabilize(capsys):
    code, data = call_json(capsys, "stabilize", "p1xp1", "--m", "2")
    assert data["verdict"] == "stabilizes" and data["k1"] is not None
    code, data = call_json(capsys, "stabilize", "p2", "--m", "2")
    assert data["verdict"] == "strict"


def test_orbits(capsys):
    code, data = call_json(capsys, "orbits", "p2", "--k", "1", "--group", "gens:[[0,1],[1,0]]")
    assert code == 0 and data["count"] == 6
    code, data = call_json(capsys, "orbits", "p2", "--group", '{"generators": [[[-1,-1],[1,0]]]}')
    assert data["count"] == 4 and data["group_order"] == 3


def test_orbits_text(capsys):
    code, out, _ = call(capsys, "orbits", "p2", "--group", "gens:[[-1,-1],[1,0]]", "--format", "text")
    assert code == 0
    assert "count: 4" in out
    assert out.count("orbit ") == 4


def test_ehrhart(capsys):
    code, data = call_json(capsys, "ehrhart", "p2", "--kmax", "6")
    assert code == 0 and data["passed"]
    assert data["counts"][:3] == [10, 28, 55]
    assert data["volume"] == "9/2"


def test_k0(capsys):
    code, data = call_json(capsys, "k0", "dp1", "--group", "full-aut")
    assert data["k0"] == 2
    code, data = call_json(capsys, "k0", "p2", "--group", "gens:[[0,1],[1,0]]")
    assert data["k0"] == 1 and data["witness"] == ["-1", "-1"]


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(lookup("p2").to_json())))
    code, data = call_json(capsys, "alpha", "--input", "-")
    assert code == 0 and data["value"] == "1/3"


def test_vertex_input(capsys, tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({"name": "sq", "vertices": [["1", "1"], [1, -1], [-1, 1], [-1, -1]]}))
    code, data = call_json(capsys, "alpha", str(path), "--group", "full-aut")
    assert code == 0 and data["value"] == "1" and data["group_order"] == 8


@pytest.mark.parametrize(
    "argv",
    [
        ["alpha", "nosuchfile.json"],
        ["alpha", "p2", "--group", "gens:[[1,1],[0,1]]"],
        ["alpha", "p2", "--group", "gens:[[2,0],[0,1]]"],
        ["alpha", "p2", "--group", "gens:[[1,0,0],[0,1,0],[0,0,1]]"],
        ["alpha", "p2", "--group", "sometimes"],
        ["alpha-km", "p2", "--k", "0", "--m", "2"],
        ["alpha-km", "p2"],
        ["frobnicate"],
        ["alpha"],
    ],
)
def test_malformed_input_exits_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2


@pytest.mark.parametrize(
    "payload",
    [
        "not json",
        json.dumps({"rays": [[1, 0], [0, 1]]}),
        json.dumps({"rays": [[2, 0], [0, 1], [-1, -1]]}),
        json.dumps({"rays": [[1.5, 0], [0, 1], [-1, -1]]}),
        json.dumps({"dim": 3, "rays": [[1, 0], [0, 1], [-1, -1]]}),
        json.dumps({"vertices": [[0.5, 0], [0, 1], [-1, -1]]}),
        json.dumps({"name": "x"}),
        json.dumps([1, 2]),
    ],
)
def test_malformed_json_exits_2(capsys, monkeypatch, payload):
    monkeypatch.setattr(sys, "stdin", io.StringIO(payload))
    code, _, err = call(capsys, "check", "-")
    assert code == 2
    assert err.startswith("error:")


def test_group_spec_grammar():
    assert parse_group_spec("trivial") == "trivial"
    assert parse_group_spec("full-aut") == "full-aut"
    assert parse_group_spec("gens:[[0,1],[1,0]];[[-1,-1],[1,0]]") == [
        [[0, 1], [1, 0]], [[-1, -1], [1, 0]]]
    assert parse_group_spec('{"generators": [[[0,1],[1,0]]]}') == [[[0, 1], [1, 0]]]


def test_verify_tap(capsys):
    code, out, _ = call(capsys, "verify", "--format", "text")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("1..")
    assert all(line.startswith("ok ") for line in lines[1:])
    assert len(lines) - 1 == int(lines[0][3:])


def test_verify_reports_failures(capsys, monkeypatch):
    import toric_alpha.cli as cli

    monkeypatch.setattr(cli, "verification_checks",
                        lambda threads=1: [("always right", 1, lambda: 1), ("always wrong", 1, lambda: 2)])
    code, out, _ = call(capsys, "verify", "--format", "text")
    assert code == 1
    assert "ok 1 always right" in out
    assert "not ok 2 always wrong (expected 1, got 2)" in out


def test_report_byte_stable(capsys):
    code1, out1, _ = call(capsys, "report", "--format", "text")
    code2, out2, _ = call(capsys, "report", "--format", "text")
    assert code1 == code2 == 0
    assert out1 == out2
    assert "p2" in out1 and "DIFFER" not in out1


def test_report_json(capsys):
    code, data = call_json(capsys, "report")
    rows = {(r["entry"], r["group"]): r for r in data["alpha_table"]}
    assert rows[("p2", "trivial")]["alpha"] == "1/3"
    assert rows[("p2", "full")]["alpha"] == "1"
    assert rows[("dp1", "full")]["k0"] == 2
    assert all(r["alpha"] == r["glct"] and r["orbit_paths_agree"] for r in data["alpha_table"])
    grass = {g["entry"]: g for g in data["grassmannian"]}
    assert (grass["p2"]["k1"], grass["p2"]["k2"], grass["p2"]["k3"]) == ("1/2", "2/5", "3/8")


def test_threads_env_does_not_change_output(capsys, monkeypatch):
    _, serial = call_json(capsys, "alpha-km", "dp3", "--k", "2", "--m", "4")
    monkeypatch.setenv("TORIC_ALPHA_THREADS", "3")
    _, threaded = call_json(capsys, "alpha-km", "dp3", "--k", "2", "--m", "4")
    assert serial == threaded
    monkeypatch.setenv("TORIC_ALPHA_THREADS", "lots")
    code, _, _ = call(capsys, "alpha-km", "dp3", "--k", "2", "--m", "4")
    assert code == 2


@pytest.mark.parametrize("e", catalog(), ids=lambda e: e.name)
def test_catalog_round_trip(e):
    again = entry_from_json(json.loads(json.dumps(e.to_json())))
    assert again.rays == e.rays
    p, q = e.polytope(), again.polytope()
    assert p == q
    for h in (FiniteGroup.trivial(p.dim), automorphism_group(p)):
        assert alpha_kG(p, e.rays, h).value == alpha_kG(q, again.rays, automorphism_group(q) if h.order > 1 else h).value
    assert alpha_km(p, e.rays, 1, 2) == alpha_km(q, again.rays, 1, 2)
    assert star_p_check(p, e.rays) == star_p_check(q, again.rays)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toric_alpha", "alpha", "p2", "--format", "text"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "value: 1/3" in proc.stdout
