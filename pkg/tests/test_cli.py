import json
import os

import pytest

from qwmvc.cli import main
from qwmvc.graph import complete_graph, format_edgelist, read_edgelist, star_graph


@pytest.fixture
def graphs(tmp_path):
    paths = {
        "star4": star_graph(4),
        "k3": complete_graph(3),
    }
    out = {}
    for name, g in paths.items():
        p = tmp_path / f"{name}.el"
        p.write_text(format_edgelist(g))
        out[name] = p
    bad = tmp_path / "bad.el"
    bad.write_text("3 1\n2 2\n")
    out["bad"] = bad
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_solve_star_quantum(capsys, graphs):
    code, out, _ = run(capsys, "solve", graphs["star4"], "--solver", "quantum")
    assert code == 0
    assert out.startswith("size=1 cover=[0] valid=true")


def test_solve_k3_exact(capsys, graphs):
    code, out, _ = run(capsys, "solve", graphs["k3"], "--solver", "exact")
    assert code == 0
    assert "size=2" in out and "proven_optimal=true" in out


def test_solve_exact_budget_exhausted(capsys, tmp_path):
    from qwmvc.graph import generate_er
    p = tmp_path / "er.el"
    p.write_text(format_edgelist(generate_er(40, 0.5, 3)))
    code, out, _ = run(capsys, "solve", p, "--solver", "exact", "--budget", "1")
    assert code == 2
    assert "valid=true" in out and "proven_optimal=false" in out


def test_solve_bad_file_names_line(capsys, graphs):
    code, _, err = run(capsys, "solve", graphs["bad"])
    assert code == 1
    assert "line 2" in err


def test_solve_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "solve", tmp_path / "nope.el")
    assert code == 1 and "nope.el" in err


def test_solve_trace(capsys, graphs):
    code, out, _ = run(capsys, "solve", graphs["k3"], "--trace")
    assert code == 0
    lines = out.splitlines()
    assert lines[1].startswith("  iter 1: vertex=0 score=")
    assert "remaining_edges=0" in lines[2]


SCHEMA_KEYS = {"schema", "solver", "n", "edges", "size", "cover", "valid", "wall_time",
               "iterations", "proven_optimal", "trace"}


@pytest.mark.parametrize("solver", ["quantum", "2approx", "fastvc", "sa", "exact", "brute"])
def test_solve_json_schema(capsys, graphs, solver):
    code, out, _ = run(capsys, "solve", graphs["star4"], "--solver", solver, "--json",
                       "--trace")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == SCHEMA_KEYS
    assert doc["schema"] == 1 and doc["valid"] is True
    assert doc["cover"] == sorted(doc["cover"]) and doc["size"] == len(doc["cover"])
    assert json.loads(json.dumps(doc)) == doc
    if solver == "quantum":
        assert doc["trace"][0]["vertex"] == 0
    if solver in ("exact", "brute"):
        assert doc["proven_optimal"] is True


def test_unknown_flag_is_error(capsys, graphs):
    with pytest.raises(SystemExit) as info:
        main(["solve", str(graphs["k3"]), "--frobnicate"])
    code = info.value.code
    assert code == 1


def test_missing_subcommand(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_generate_then_solve(capsys, tmp_path):
    p = tmp_path / "ba.el"
    code, _, _ = run(capsys, "generate", "--family", "BA", "--n", "20", "--param", "2",
                     "--seed", "5", "--out", p)
    assert code == 0
    g = read_edgelist(p)
    assert g.n == 20 and g.num_edges == 2 + 17 * 2
    code, out, _ = run(capsys, "generate", "--family", "BA", "--n", "20", "--param", "2",
                       "--seed", "5")
    assert out == p.read_text()
    code, _, _ = run(capsys, "solve", p, "--solver", "sa")
    assert code == 0


def test_generate_bad_param(capsys):
    code, _, err = run(capsys, "generate", "--family", "ER", "--n", "5", "--param", "1.5")
    assert code == 1 and "invalid parameter" in err


SMOKE = {"preset": "smoke"}


def test_bench_smoke(capsys, tmp_path):
    cfg = tmp_path / "smoke.json"
    cfg.write_text(json.dumps(SMOKE))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    code, out, _ = run(capsys, "bench", "--config", cfg, "--out", out_a)
    assert code == 0
    assert [ln.split(":")[0] for ln in out.splitlines()[:3]] == ["ER", "BA", "REG"]
    names = sorted(os.listdir(out_a))
    assert names == ["curves.csv", "heatmap.csv", "records.csv", "run_meta.json"]
    meta = json.loads((out_a / "run_meta.json").read_text())
    rows = (out_a / "records.csv").read_text().splitlines()
    assert len(rows) - 1 == meta["records"] == meta["instances"] * 4
    run(capsys, "bench", "--config", cfg, "--out", out_b)
    for name in ("records.csv", "heatmap.csv", "curves.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    code, out, _ = run(capsys, "report", out_a / "records.csv")
    assert code == 0
    assert "solver,ER,BA,REG" in out and "family,solver,n,mean,std,count" in out


def test_bench_invalid_config(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"instances_per_config": 0}))
    code, _, err = run(capsys, "bench", "--config", cfg, "--out", tmp_path / "o")
    assert code == 1 and "instances_per_config" in err


def test_bench_unwritable_out(capsys, tmp_path):
    cfg = tmp_path / "smoke.json"
    cfg.write_text(json.dumps(SMOKE))
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "bench", "--config", cfg, "--out", blocker / "sub")
    assert code == 2 and "cannot write" in err


def test_report_missing_columns(capsys, tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("family,n\nER,4\n")
    code, _, _ = run(capsys, "report", p)
    assert code == 1


def test_verify(capsys, graphs):
    code, out, _ = run(capsys, "verify", graphs["k3"], "--omega", "100", "1e6", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["trotter_max_diff"] <= 1e-12
    assert abs(doc["unitarity_defect"]) <= 1e-8
    low, high = doc["freezing"]
    assert high["max_amplitude_deviation"] <= 1e-3 < low["max_amplitude_deviation"]
    code, out, _ = run(capsys, "verify", graphs["k3"], "--frozen", "7")
    assert code == 1
