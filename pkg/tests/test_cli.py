from __future__ import annotations

import json

import pytest

from dagswarm.cli import ENDPOINT_ENV, parse_config, run_cli


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_parse_config_empty_file_is_defaults(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    cfg = parse_config(str(path))
    assert cfg.matrix_swarm_size == 10 and cfg.patience == 6


def test_parse_config_rejects_non_object(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2]")
    with pytest.raises(ValueError):
        parse_config(str(path))


def test_decode_command_deterministic_small_p(tmp_path, capsys):
    matrix = write(tmp_path / "m.json", [[0.0, 0.99], [0.01, 0.0]])
    assert run_cli(["decode", "--matrix", matrix, "--top-p", "0.05"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["dag"] == {"n": 2, "end_node": 1, "edges": [[0, 1]], "topo_order": [0, 1]}


def test_decode_accepts_wrapped_matrix_and_writes_file(tmp_path, capsys):
    matrix = write(tmp_path / "m.json", {"matrix": [[0.0, 0.99], [0.01, 0.0]]})
    out = tmp_path / "dag.json"
    assert run_cli(["decode", "--matrix", matrix, "--top-p", "0.05", "--out", str(out)]) == 0
    capsys.readouterr()
    assert json.loads(out.read_text())["dag"]["end_node"] == 1


def test_optimize_constant_utility_stops_after_patience(tmp_path, capsys):
    cfg = write(
        tmp_path / "cfg.json",
        {"n_experts": 3, "patience": 2, "max_iterations": 20, "utility_spec": {"name": "constant"}},
    )
    assert run_cli(["optimize", "--config", cfg, "--out", str(tmp_path / "run")]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["iterations"] == 3
    assert (tmp_path / "run" / "best_system.json").exists()
    assert (tmp_path / "run" / "trace.jsonl").exists()


def test_optimize_mode_and_seed_overrides(tmp_path, capsys):
    cfg = write(
        tmp_path / "cfg.json",
        {
            "n_experts": 4,
            "matrix_swarm_size": 4,
            "assignments_per_step": 4,
            "max_iterations": 4,
            "patience": 2,
            "utility_spec": {"name": "hidden_dag", "n": 4},
        },
    )
    rc = run_cli(
        ["optimize", "--config", cfg, "--seed", "3", "--mode", "role_only", "--out", str(tmp_path / "a")]
    )
    assert rc == 0
    capsys.readouterr()
    trace = (tmp_path / "a" / "trace.jsonl").read_text().splitlines()
    assert all(json.loads(line)["ran_weight"] is False for line in trace)


def test_unknown_config_key_reported_as_error_json(tmp_path, capsys):
    cfg = write(tmp_path / "cfg.json", {"wobble": 3})
    assert run_cli(["optimize", "--config", cfg, "--out", str(tmp_path / "x")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert "wobble" in err["error"]["message"]


def test_out_of_range_tau_rejected(tmp_path, capsys):
    cfg = write(tmp_path / "cfg.json", {"sparsity": {"mode": "threshold", "tau": 1.5}})
    assert run_cli(["optimize", "--config", cfg, "--out", str(tmp_path / "x")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "ValueError"


def test_usage_error_is_json_with_exit_2(capsys):
    with pytest.raises(SystemExit) as exit_info:
        run_cli(["warp-speed"])
    assert exit_info.value.code == 2
    assert json.loads(capsys.readouterr().err)["error"]["type"] == "UsageError"


def test_jobs_validation(capsys):
    assert run_cli(["optimize", "--jobs", "0", "--out", "unused"]) == 2
    capsys.readouterr()


def test_analyze_writes_report_and_csv(tmp_path, capsys):
    correctness = write(
        tmp_path / "corr.json",
        {"per_expert_correct": [[0, 0], [1, 0], [0, 1], [1, 1]], "system_correct": [1, 1, 0, 1]},
    )
    trace_path = tmp_path / "trace.jsonl"
    trace_path.write_text(
        json.dumps(
            {
                "iteration": 0, "ran_role": True, "ran_weight": True,
                "best_role_utility": 0.5, "best_utility": 0.5,
                "best_contribution": None, "evaluator_calls": 8,
            }
        )
        + "\n"
    )
    rc = run_cli(
        [
            "analyze", "--correctness", correctness, "--trace", str(trace_path),
            "--out", str(tmp_path / "an"),
        ]
    )
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["collaborative_gain"] == 0.0
    report = json.loads((tmp_path / "an" / "report.json").read_text())
    assert report["solved_from_zero_rate"] == 1.0
    csv_text = (tmp_path / "an" / "metrics.csv").read_text()
    assert csv_text.splitlines()[0].startswith("iteration,")
    assert len(csv_text.splitlines()) == 2


def test_evaluate_affine_system(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(ENDPOINT_ENV, raising=False)
    cfg = write(
        tmp_path / "cfg.json",
        {
            "n_experts": 3,
            "matrix_swarm_size": 3,
            "assignments_per_step": 3,
            "max_iterations": 2,
            "patience": 2,
            "utility_spec": {"name": "affine_target", "n": 3, "points": 2},
        },
    )
    assert run_cli(["optimize", "--config", cfg, "--out", str(tmp_path / "run")]) == 0
    capsys.readouterr()
    dataset = tmp_path / "data.jsonl"
    dataset.write_text(json.dumps({"input": [0.1, 0.2]}) + "\n")
    rc = run_cli(
        ["evaluate", "--system", str(tmp_path / "run" / "best_system.json"), "--dataset", str(dataset)]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["accuracy"] is None  # no answers supplied
    assert len(payload["results"][0]["output"]) == 2


def test_evaluate_remote_system(tmp_path, capsys, monkeypatch, clean_stub):
    monkeypatch.setenv(ENDPOINT_ENV, clean_stub.endpoint)
    system = {
        "format_version": 1,
        "dag": {"n": 2, "end_node": 1, "edges": [[0, 1]], "topo_order": [0, 1]},
        "assignment": [0, 1],
        "experts": [[0.0], [0.0]],
        "best_utility": 0.0,
        "best_role_utility": 0.0,
    }
    system_path = write(tmp_path / "sys.json", system)
    dataset = tmp_path / "data.jsonl"
    dataset.write_text(json.dumps({"input": "2+2", "answer": "4"}) + "\n")
    assert run_cli(["evaluate", "--system", system_path, "--dataset", str(dataset)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["accuracy"] == 0.0  # the echo stub answers with the prompt
    assert payload["results"][0]["output"].startswith("Please answer")


def test_sweep_ranks_runs(tmp_path, capsys):
    cfg = write(
        tmp_path / "cfg.json",
        {
            "n_experts": 3,
            "matrix_swarm_size": 2,
            "assignments_per_step": 2,
            "max_iterations": 2,
            "patience": 2,
            "mode": "role_only",
            "utility_spec": {"name": "hidden_dag", "n": 3},
        },
    )
    assert run_cli(["sweep", "--config", cfg, "--runs", "3", "--out", str(tmp_path / "sw")]) == 0
    capsys.readouterr()
    payload = json.loads((tmp_path / "sw" / "sweep.json").read_text())
    assert len(payload["runs"]) == 3
    utilities = [r["best_utility"] for r in payload["runs"]]
    assert utilities == sorted(utilities, reverse=True)
    grid_point = payload["runs"][0]["hyperparams"]
    assert set(grid_point) == {"step_length", "inertia", "cognitive", "social", "repel"}
