import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from adspoly.cli import dumps, main
from adspoly.polyhedron import angle_map, polyhedron_from_json
from samples import polyhedra

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, json.loads(capsys.readouterr().out)


def test_check_angles_admissible(capsys):
    code, body = run(capsys, "check-angles", FIXTURES / "tetra_admissible.json")
    assert code == 0 and body["satisfied"]
    assert set(body["predictedSigns"].values()) == {"0"}


def test_check_angles_violated(capsys):
    code, body = run(capsys, "check-angles", FIXTURES / "tetra_violated.json")
    assert code == 2 and not body["satisfied"]
    vertex_rows = [v for v in body["violations"] if v["condition"] == "ii"]
    assert len(vertex_rows) == 4
    assert all(v["lhs"] == pytest.approx(-1.0) for v in vertex_rows)


def test_flip_graph(capsys):
    assert run(capsys, "flip-graph", "--n", 5) == (0, {"count": 10, "connected": True})


def test_size_cap_refusal(capsys, monkeypatch):
    monkeypatch.setenv("ADSPOLY_MAX_N", "4")
    code, body = run(capsys, "flip-graph", "--n", 5)
    assert code == 3 and body["error"] == "TooLarge"
    code, _ = run(capsys, "check-angles", FIXTURES / "tetra_admissible.json")
    assert code == 0


def test_domain_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [[0, 0, 0], [0.1, 0, 0], [0, 0.1, 0], [0, 0, 0.1]]}')
    code, body = run(capsys, "build", bad)
    assert code == 2 and "error" in body
    code, _ = run(capsys, "check-angles", tmp_path / "missing.json")
    assert code == 2


def test_realize_writes_polyhedron(capsys, tmp_path):
    out, obj = tmp_path / "p.json", tmp_path / "p.obj"
    code, body = run(capsys, "realize", "--angles", FIXTURES / "tetra_admissible.json", "--out", out, "--obj", obj)
    assert code == 0 and body["residual"] < 1e-8
    assert body["log"] and body["log"][-1]["t"] == 1.0
    P = polyhedron_from_json(json.loads(out.read_text()))
    assert P.vertex_signs == ("0",) * 4
    text = obj.read_text()
    assert "o polyhedron" in text and "o quadric" in text
    code, rep = run(capsys, "rigidity", out)
    assert code == 0 and rep["pass"] and rep["kernelDim"] == 6


def test_byte_identical_reruns(tmp_path):
    cmd = [sys.executable, "-m", "adspoly.cli", "realize", "--angles", str(FIXTURES / "tetra_admissible.json"), "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b


def test_schema_round_trip(capsys, tmp_path):
    for P in polyhedra()[:6]:
        path = tmp_path / "p.json"
        path.write_text(dumps(P.to_json()))
        Q = polyhedron_from_json(json.loads(path.read_text()))
        assert np.array_equal(Q.lifts, P.lifts) or np.abs(Q.lifts - P.lifts).max() < 1e-15
        assert Q.faces == P.faces and Q.vertex_signs == P.vertex_signs
        code, body = run(capsys, "angles", path)
        assert code == 0
        assert body["theta"] == pytest.approx(angle_map(P).as_mapping(), abs=1e-12)


@pytest.mark.parametrize("command", ["dual", "truncate", "metric", "holonomy", "build"])
def test_polyhedron_commands(capsys, tmp_path, command):
    P = polyhedra()[3]
    path = tmp_path / "p.json"
    path.write_text(dumps(P.to_json()))
    code, body = run(capsys, command, path)
    assert code == 0 and body


def test_sample_then_check(capsys, tmp_path):
    code, theta = run(capsys, "sample-angles", FIXTURES / "hexagon_graph.json", "--seed", 2, "--signs", "0+0+0+")
    assert code == 0
    path = tmp_path / "theta.json"
    path.write_text(dumps(theta))
    code, rep = run(capsys, "check-angles", path)
    assert code == 0 and rep["satisfied"]
    assert list(rep["predictedSigns"].values()) == list("0+0+0+")


def test_float_format():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(2.0) == "2.0"
    assert dumps(1e-20) == "9.9999999999999995e-21"
    assert json.loads(dumps({"a": [np.float64(0.3), np.int64(2), True]})) == {"a": [0.3, 2, True]}
