from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import networkx as nx
import pytest

from trop_aspt import cli
from trop_aspt import fan as F


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_text(capsys):
    code, out, _ = run(capsys, "enumerate", "-n", "3")
    assert code == 0
    assert out == "ASPTs: 35 (dim3:1, dim4:13, dim5:21); ASDO:12 CSDO:4\n"


def test_enumerate_json_is_stable(capsys):
    _, first, _ = run(capsys, "enumerate", "-n", "3", "--format", "json")
    _, second, _ = run(capsys, "enumerate", "-n", "3", "--format", "json")
    assert first == second
    data = json.loads(first)
    assert list(data) == ["n", "aspts", "orderings"]
    assert data["aspts"] == {"total": 35, "by_dim": {"3": 1, "4": 13, "5": 21}}
    assert data["orderings"] == {"ASDO": 12, "CSDO": 4}


def test_capacity_exit_code(capsys):
    code, _, err = run(capsys, "enumerate", "-n", "6")
    assert code == 2 and "capacity" in err


def test_verify_capped_at_four(capsys):
    code, _, _ = run(capsys, "verify", "-n", "5")
    assert code == 2


def test_export_dot_reproduces_facet_graph(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "-n", "3", "--format", "dot")
    assert code == 0
    g = nx.Graph()
    for line in out.splitlines():
        if " -- " in line:
            u, rest = line.strip().split(" -- ")
            g.add_edge(u, rest.split()[0])
    assert g.number_of_nodes() == 13 and g.number_of_edges() == 21
    assert nx.is_isomorphic(g, F.build_fan(3).ray_graph())
    _, dot_flag, _ = run(capsys, "export", "-n", "3", "--dot")
    assert dot_flag == out


def test_export_json_validates(capsys):
    code, out, _ = run(capsys, "export", "-n", "3", "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), F.fan_schema())


def test_export_hexagon_subfan(capsys):
    code, out, _ = run(capsys, "export", "-n", "3", "--subfan", "1,2,3,1~,2~,3~")
    assert code == 0
    assert "ray graph: 6 nodes, 6 edges" in out


def test_export_generic_subfan_rejected(capsys):
    code, _, err = run(capsys, "export", "-n", "3", "--subfan", "1,1~,2,2~,3,3~")
    assert code == 2 and "neither" in err


def test_export_io_failure(capsys, tmp_path):
    code, _, err = run(capsys, "export", "-n", "3", "--output", str(tmp_path / "missing" / "fan.dot"))
    assert code == 3 and "I/O" in err


def test_export_writes_file_only_when_asked(capsys, tmp_path):
    target = tmp_path / "fan.json"
    code, out, _ = run(capsys, "export", "-n", "3", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    jsonschema.validate(json.loads(target.read_text()), F.fan_schema())


def test_member_roundtrip(capsys, tmp_path):
    cone = next(c for c in F.build_fan(3).cones if c.dim == 5)
    path = tmp_path / "w.json"
    path.write_text(json.dumps(list(cone.interior_point)))
    code, out, _ = run(capsys, "member", "-n", "3", "--input", str(path), "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["member"] and data["orbit_weights"] == ["0", "0", "0", "1", "1"]
    assert not data["boundary"]


def test_member_off_the_fan(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps(["1/2", 3, -7, 1, 0, 2, 5, 9, -1]))
    code, out, _ = run(capsys, "member", "-n", "3", "--input", str(path))
    assert code == 0 and out == "not in the fan\n"


def test_member_bad_input(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text("[1, 2]")
    assert run(capsys, "member", "-n", "3", "--input", str(path))[0] == 2
    assert run(capsys, "member", "-n", "3", "--input", str(tmp_path / "nope.json"))[0] == 3


def test_threads_env_validated(capsys, monkeypatch):
    monkeypatch.setenv("TROP_ASPT_THREADS", "zero")
    assert run(capsys, "enumerate", "-n", "3")[0] == 2
    monkeypatch.setenv("TROP_ASPT_THREADS", "4")
    code, out, _ = run(capsys, "enumerate", "-n", "3")
    assert code == 0 and out.startswith("ASPTs: 35")


def test_signs_report(capsys):
    code, out, _ = run(capsys, "signs", "-n", "3", "--seed", "3")
    assert code == 0
    assert "quadrics: 9" in out
    assert "occurring sign patterns:" in out


def test_signs_json_carries_witnesses(capsys):
    _, out, _ = run(capsys, "signs", "-n", "3", "--format", "json")
    data = json.loads(out)
    assert len(data["relations"]) == 9
    first = data["patterns"][0]
    assert set(first) == {"pattern", "witness", "z", "scale"}


def _verdicts(out):
    return [line.split(":")[0] for line in out.splitlines() if line[:4] in ("PASS", "FAIL", "INFO")]


def test_verify_verdicts_independent_of_seed(capsys):
    code7, out7, _ = run(capsys, "verify", "-n", "3", "--seed", "7")
    code8, out8, _ = run(capsys, "verify", "-n", "3", "--seed", "8")
    assert code7 == code8
    assert _verdicts(out7) == _verdicts(out8)
    for name in ("purity", "dimension", "lineality", "facets", "injectivity", "posets",
                 "relations", "prevariety", "positivity"):
        assert f"PASS {name}" in _verdicts(out7)


def test_verify_output_deterministic(capsys):
    _, a, _ = run(capsys, "verify", "-n", "3", "--seed", "7", "--format", "json")
    _, b, _ = run(capsys, "verify", "-n", "3", "--seed", "7", "--format", "json")
    assert a == b


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "trop_aspt.cli", "enumerate", "-n", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("ASPTs: 35")


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["enumerate"])
    assert exc.value.code == 2
