"""Command-line interface tests: subcommands, config files, exit codes."""

from __future__ import annotations

import json

import pytest

from cograd.cli import main
from cograd.graph import parse_gset, write_gset, Graph


@pytest.fixture()
def ring6(tmp_path):
    path = tmp_path / "ring6.txt"
    assert main(["gen", "--n", "6", "--d", "3", "--seed", "1",
                 "--out", str(path)]) == 0
    return str(path)


def test_gen_produces_regular_graph(ring6):
    g = parse_gset(open(ring6).read())
    assert g.n == 6
    assert all(int(d) == 3 for d in g.degree)


def test_gen_missing_flag_is_usage_error(capsys):
    assert main(["gen", "--d", "3"]) == 1
    assert "--n" in capsys.readouterr().err


def test_no_command_is_usage_error():
    assert main([]) == 1


def test_bad_problem_choice_is_usage_error():
    assert main(["solve", "--problem", "tsp", "--input", "x"]) == 1


def test_oracle_json_row(tmp_path, capsys):
    path = tmp_path / "c4.txt"
    path.write_text(write_gset(Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])))
    assert main(["oracle", "--problem", "maxcut", "--input", str(path)]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["objective"] == 4.0
    assert row["method"] == "oracle"
    assert row["feasible"] is True
    assert row["assignment"] in ([0, 1, 0, 1], [1, 0, 1, 0])


def test_solve_csv_schema(ring6, capsys):
    assert main(["solve", "--problem", "maxcut", "--input", ring6,
                 "--epochs", "300", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "instance,n,m,method,objective,feasible,runtime_ms,seed,epsilon"
    cells = lines[1].split(",")
    assert cells[0] == "ring6"
    assert cells[3] == "gnn-solver"
    assert cells[5] == "true"


def test_solve_missing_input_is_data_error(capsys):
    assert main(["solve", "--problem", "maxcut", "--input", "/missing.txt"]) == 2
    assert "missing.txt" in capsys.readouterr().err


def test_solve_divergence_exit_code(ring6, capsys):
    code = main(["solve", "--problem", "maxcut", "--input", ring6,
                 "--seed", "1", "--lr", "1e150", "--epochs", "50"])
    assert code == 3
    assert "diverged" in capsys.readouterr().err


def test_dfl_json_schema(ring6, capsys):
    assert main(["dfl", "--problem", "mis", "--input", ring6,
                 "--observe", "1.0", "--lambda", "0.5",
                 "--epochs", "300"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["problem"] == "mis"
    assert doc["lambda"] == 0.5
    assert doc["observe_fraction"] == 1.0
    assert doc["feasible_true"] is True
    assert "combined_loss" in doc


def test_bench_with_config(tmp_path, ring6, capsys):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps({
        "problem": "maxcut",
        "instances": [{"name": "ring6", "path": ring6}],
        "methods": ["oracle", "dga"],
        "seeds": 2,
    }))
    assert main(["bench", "--config", str(cfg)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 4  # header + 2 methods x 2 seeds
    assert [l.split(",")[7] for l in lines[1:]] == ["0", "1", "0", "1"]


def test_config_file_supplies_required_flags(tmp_path, ring6, capsys):
    cfg = tmp_path / "solve.json"
    cfg.write_text(json.dumps(
        {"problem": "maxcut", "input": ring6, "epochs": 200}
    ))
    assert main(["solve", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["method"] == "gnn-solver"


def test_cli_flag_overrides_config(tmp_path, ring6, capsys):
    cfg = tmp_path / "solve.json"
    cfg.write_text(json.dumps(
        {"problem": "maxcut", "input": ring6, "epochs": 200, "seed": 5}
    ))
    assert main(["solve", "--config", str(cfg), "--seed", "7"]) == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 7


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"problem": "maxcut", "wibble": 1}))
    assert main(["solve", "--config", str(cfg)]) == 1
    assert "wibble" in capsys.readouterr().err


def test_malformed_config_is_usage_error(tmp_path):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    assert main(["solve", "--config", str(cfg)]) == 1


def test_out_flag_writes_file(tmp_path, ring6):
    out = tmp_path / "row.json"
    assert main(["oracle", "--problem", "mis", "--input", ring6,
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["method"] == "oracle"
