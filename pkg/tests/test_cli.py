import json
import subprocess
import sys

import pytest

from mpcgraph.cli import bench_check, main
from mpcgraph.generators import gen_gnp, petersen
from mpcgraph.graph import write_edge_list


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


@pytest.fixture()
def edge_file(tmp_path):
    path = tmp_path / "g.el"
    with open(path, "w") as fh:
        write_edge_list(gen_gnp(400, 0.03, 1), fh)
    return path


def test_mis_report(tmp_path):
    code, rep = run(tmp_path, "mis", "--gen", "gnp:1000,0.01", "--seed", "7")
    assert code == 0
    assert rep["certificates"]["verify_mis"] and rep["certificates"]["oracle_equal"]
    assert rep["phases"] <= rep["details"]["phase_limit"]
    assert rep["passed"] is True


def test_matching_strict_space(tmp_path, edge_file):
    code, rep = run(tmp_path, "matching", "--input", str(edge_file), "--eps", "0.02", "--seed", "3", "--strict-space")
    assert code == 0
    assert rep["certificates"] == {
        "approximation": True, "cover": True, "feasible": True, "phase_bound": True, "space": True,
    }


def test_matching_space_failure_exit_1(tmp_path, edge_file):
    code, rep = run(tmp_path, "matching", "--input", str(edge_file), "--strict-space", "--space-slack", "1")
    assert code == 1
    assert rep["certificates"]["space"] is False and "space_violation" in rep["details"]


def test_report_is_deterministic(tmp_path):
    a = run(tmp_path, "vcover", "--gen", "gnp:800,0.02", "--seed", "4")[1]
    b = run(tmp_path, "vcover", "--gen", "gnp:800,0.02", "--seed", "4")[1]
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


def test_saved_outputs_verify(tmp_path, edge_file):
    m = tmp_path / "m.txt"
    code, rep = run(tmp_path, "round", "--input", str(edge_file), "--seed", "2", "--save", str(m))
    assert code == 0 and rep["sizes"]["matching"] == len(m.read_text().splitlines())
    assert run(tmp_path, "verify", "--input", str(edge_file), "--matching", str(m))[0] == 0
    cover = tmp_path / "c.txt"
    assert run(tmp_path, "vcover", "--input", str(edge_file), "--save", str(cover))[0] == 0
    assert run(tmp_path, "verify", "--input", str(edge_file), "--cover", str(cover))[0] == 0


def test_verify_rejects_invalid_matching(tmp_path):
    g = tmp_path / "p.el"
    g.write_text("10 20\n20 30\n")
    m = tmp_path / "m.txt"
    m.write_text("10 20\n20 30\n")
    code, rep = run(tmp_path, "verify", "--input", str(g), "--matching", str(m))
    assert code == 1 and rep["certificates"]["valid_matching"] is False
    m.write_text("10 20\n")
    assert run(tmp_path, "verify", "--input", str(g), "--matching", str(m))[0] == 0
    m.write_text("10 99\n")
    assert run(tmp_path, "verify", "--input", str(g), "--matching", str(m))[0] == 1


def test_trace_export(tmp_path):
    trace = tmp_path / "t.csv"
    code, _ = run(tmp_path, "mis", "--gen", "gnp:300,0.05", "--trace", str(trace), "--format", "csv")
    assert code == 0
    assert trace.read_text().splitlines()[0] == "round,phase,machine,load,tag"


def test_usage_errors(tmp_path, capsys):
    assert main(["mis"]) == 2
    assert main(["mis", "--input", str(tmp_path / "missing.el")]) == 2
    bad = tmp_path / "bad.el"
    bad.write_text("0 1\n3 3\n")
    assert main(["mis", "--input", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["matching", "--gen", "petersen", "--eps", "0.5"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["mis", "--bogus"])
    assert info.value.code == 2


def test_bench(tmp_path):
    rows = tmp_path / "rows.csv"
    code, rep = run(tmp_path, "bench", "--algo", "mis", "--n-min", "256", "--n-max", "4096", "--seeds", "2",
                    "--csv", str(rows))
    assert code == 0
    assert len(rows.read_text().splitlines()) == 1 + 3 * 2
    assert rep["certificates"] == {"non_decreasing": True, "sub_doubling": True}


def test_bench_check():
    rows = [{"n": 1, "phases": 2}, {"n": 4, "phases": 3}, {"n": 16, "phases": 7}]
    check = bench_check(rows)
    assert check["non_decreasing"] and not check["sub_doubling"]
    assert not bench_check([{"n": 1, "phases": 3}, {"n": 4, "phases": 2}])["non_decreasing"]


def test_module_entry_point(tmp_path):
    path = tmp_path / "pet.el"
    with open(path, "w") as fh:
        write_edge_list(petersen(), fh)
    proc = subprocess.run([sys.executable, "-m", "mpcgraph", "round", "--input", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["certificates"]["valid_matching"] is True
