import json
import os

import pytest

from loopnav.loopnav import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, main


def test_dump_chains(capsys):
    assert main(["dump-chains", "fig1.ln"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "c0 (root):" in out
    assert "c4 (sub of c0" in out


def test_dump_constraints_json(capsys):
    assert main(["dump-constraints", "fig1.ln", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["eliminated"] == []
    assert len(data["systems"][0]["constraints"]) == 6


def test_dump_constraints_lists_eliminated_roots(capsys):
    assert main(["dump-constraints", "fig1_a17.ln"]) == EXIT_OK
    assert "eliminated: c0" in capsys.readouterr().out


def test_analyze(capsys):
    assert main(["analyze", "fig1.ln"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("fig1.ln: feasible")
    assert "path condition (30 literals)" in out


def test_prove(capsys):
    assert main(["prove", "fig1.ln"]) == EXIT_INCONCLUSIVE
    capsys.readouterr()
    assert main(["--json", "prove", "oneloop.ln"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["outcome"] == "infeasible"
    assert data["evidence"] == "eliminated-roots"
    assert data["config"]["seed_order"] == "dfs"


def test_flags_after_the_subcommand(capsys):
    assert main(["analyze", "fig1.ln", "--json", "--seed-order", "reverse",
                 "--max-states", "50000"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["config"]["seed_order"] == "reverse"
    assert data["config"]["max_states"] == 50000


def test_budget_gives_inconclusive(capsys):
    assert main(["analyze", "fig1.ln", "--max-states", "3"]) == EXIT_INCONCLUSIVE
    assert "inconclusive" in capsys.readouterr().out


def test_errors(tmp_path):
    assert main(["analyze", str(tmp_path / "missing.ln")]) == EXIT_ERROR
    broken = tmp_path / "broken.ln"
    broken.write_text("int a = ;")
    assert main(["analyze", str(broken)]) == EXIT_ERROR
    assert main(["bench", "--filter", "nothing-like-this"]) == EXIT_ERROR


def test_bench(tmp_path, capsys):
    output = tmp_path / "summary.ecsv"
    plot = tmp_path / "summary.png"
    assert main(["bench", "--filter", "loop", "--output", str(output), "--plot", str(plot)]) == EXIT_OK
    assert "TwoLoops" in capsys.readouterr().out
    assert output.exists()
    assert plot.exists()


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "loopnav" in capsys.readouterr().out


def shape(data, nested=("stats", "config")):
    """Key -> type name, descending into the nested records."""
    return {k: shape(v, ()) if k in nested else type(v).__name__ for k, v in data.items()}


def test_json_report_matches_the_stored_shape(capsys):
    with open(os.path.join(os.path.dirname(__file__), "data", "analyze_report.json")) as f:
        stored = json.load(f)
    assert main(["analyze", "fig1.ln", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert shape(data) == stored
    assert list(data) == list(stored)
    assert (data["program"], data["outcome"]) == ("fig1.ln", "feasible")
    assert data["stats"]["pc_len"] == len(data["pc"]) == 30
    assert all(isinstance(v, int) for v in data["witness"].values())
