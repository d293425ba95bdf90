"""Command-line entry points binding the modules into runnable workflows.

Subcommands: optimize (full run), decode (one structure decode), evaluate
(run a saved system on a dataset), analyze (bucket metrics from
correctness files), sweep (random hyperparameter draws from the preset
grid), serve-stub (echo server for remote-mode testing). All failures
exit nonzero with a one-line error JSON on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .executor import AffineEvaluator, Assignment, Message, execute
from .graph import DagStructure, decode_dag
from .metrics import analysis_report, bucketize, trace_csv
from .orchestrate import RunConfig, RunTrace, TraceRow, config_from_dict, optimize
from .pool import load_pool
from .pso import sample_grid_hyperparams
from .remote import RemoteEvaluator, StubServer
from .rng import RngFactory
from .utilities import build_utility

ENDPOINT_ENV = "DAGSWARM_ENDPOINT"


def parse_config(path: str | None) -> RunConfig:
    """Read a JSON config file; an empty file means full defaults."""
    if path is None:
        return RunConfig()
    text = Path(path).read_text()
    if not text.strip():
        return RunConfig()
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("config root must be a JSON object")
    return config_from_dict(data)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": {"type": "UsageError", "message": message}}), file=sys.stderr)
        raise SystemExit(2)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if getattr(args, "mode", None) is not None:
        updates["mode"] = args.mode
    return replace(cfg, **updates) if updates else cfg


def _node_evaluator():
    endpoint = os.environ.get(ENDPOINT_ENV)
    if endpoint:
        return RemoteEvaluator(endpoint)
    return None


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_matrix(path: str) -> np.ndarray:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("matrix")
    matrix = np.asarray(data, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix file must hold a square matrix")
    return matrix


def _load_system(path: str) -> tuple[DagStructure, Assignment, list[np.ndarray]]:
    data = json.loads(Path(path).read_text())
    dag = DagStructure.from_dict(data["dag"])
    assignment = Assignment(tuple(int(s) for s in data["assignment"]))
    experts = [np.asarray(vec, dtype=float) for vec in data["experts"]]
    return dag, assignment, experts


def cmd_optimize(args) -> int:
    cfg = _apply_overrides(parse_config(args.config), args)
    rng = RngFactory(cfg.seed)
    utility = build_utility(cfg.utility_spec, rng.stream("task"), _node_evaluator())
    pool = load_pool(args.pool) if args.pool else None
    system, trace = optimize(
        cfg, pool, utility, checkpoint_path=args.checkpoint, resume_from=args.resume
    )
    out = _out_dir(args)
    (out / "best_system.json").write_text(system.to_json())
    trace.write_jsonl(out / "trace.jsonl")
    print(
        json.dumps(
            {
                "best_utility": system.best_utility,
                "best_role_utility": system.best_role_utility,
                "iterations": len(trace.rows),
                "evaluator_calls": trace.total_evaluator_calls,
                "out": str(out),
            },
            sort_keys=True,
        ),
        flush=True,
    )
    return 0


def cmd_decode(args) -> int:
    matrix = _load_matrix(args.matrix)
    seed = args.seed if args.seed is not None else 0
    rng = RngFactory(seed).stream("decode", 0, 0)
    dag = decode_dag(matrix, args.top_p, rng)
    payload = json.dumps(
        {"format_version": 1, "top_p": args.top_p, "seed": seed, "dag": dag.to_dict()},
        sort_keys=True,
        indent=2,
    )
    if args.out:
        Path(args.out).write_text(payload + "\n")
    print(payload, flush=True)
    return 0


def cmd_evaluate(args) -> int:
    dag, assignment, experts = _load_system(args.system)
    evaluator = _node_evaluator()
    remote = evaluator is not None
    if evaluator is None:
        evaluator = AffineEvaluator()
    items = []
    with open(args.dataset, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                items.append(json.loads(line))
    if not items:
        raise ValueError("dataset is empty")
    results = []
    correct = 0
    scored = 0
    for item in items:
        if remote:
            task = Message(str(item["input"]))
        else:
            task = Message(np.asarray(item["input"], dtype=float))
        output = execute(dag, assignment, experts, task, evaluator).payload
        entry: dict = {"input": item["input"]}
        if remote:
            entry["output"] = str(output)
            if "answer" in item:
                entry["correct"] = str(output).strip() == str(item["answer"]).strip()
        else:
            entry["output"] = [float(x) for x in np.atleast_1d(output)]
            if "answer" in item:
                expected = np.asarray(item["answer"], dtype=float)
                entry["correct"] = bool(np.allclose(expected, np.atleast_1d(output), atol=1e-9))
        if "correct" in entry:
            scored += 1
            correct += int(entry["correct"])
        results.append(entry)
    payload = {
        "format_version": 1,
        "accuracy": correct / scored if scored else None,
        "results": results,
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text, flush=True)
    return 0


def cmd_analyze(args) -> int:
    data = json.loads(Path(args.correctness).read_text())
    table = bucketize(data["per_expert_correct"], data["system_correct"])
    ablation = json.loads(Path(args.ablation).read_text()) if args.ablation else None
    report = analysis_report(table, ablation)
    out = _out_dir(args)
    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if args.trace:
        rows = []
        with open(args.trace, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    rows.append(TraceRow(**json.loads(line)))
        (out / "metrics.csv").write_text(trace_csv(RunTrace(rows)))
    print(
        json.dumps({"collaborative_gain": report["collaborative_gain"], "out": str(out)}, sort_keys=True),
        flush=True,
    )
    return 0


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(parse_config(args.config), args)
    rng = RngFactory(cfg.seed)
    evaluator = _node_evaluator()
    entries = []
    for run in range(args.runs):
        hp = sample_grid_hyperparams(rng.stream("sweep", run))
        run_cfg = replace(cfg, role_hp=hp, weight_hp=hp, seed=cfg.seed + run)
        utility = build_utility(run_cfg.utility_spec, RngFactory(run_cfg.seed).stream("task"), evaluator)
        system, trace = optimize(run_cfg, None, utility)
        entries.append(
            {
                "run": run,
                "seed": run_cfg.seed,
                "hyperparams": {
                    "step_length": hp.step_length,
                    "inertia": hp.inertia,
                    "cognitive": hp.cognitive,
                    "social": hp.social,
                    "repel": hp.repel,
                },
                "best_utility": system.best_utility,
                "iterations": len(trace.rows),
            }
        )
    entries.sort(key=lambda e: (-e["best_utility"], e["run"]))
    out = _out_dir(args)
    (out / "sweep.json").write_text(json.dumps({"format_version": 1, "runs": entries}, sort_keys=True, indent=2) + "\n")
    print(json.dumps({"best": entries[0], "out": str(out)}, sort_keys=True), flush=True)
    return 0


def cmd_serve_stub(args) -> int:
    server = StubServer(args.host, args.port)
    server.start()
    print(json.dumps({"endpoint": server.endpoint}), flush=True)
    try:
        while True:
            time.sleep(0.2)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dagswarm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mode=False):
        p.add_argument("--config", help="JSON config file (empty file = defaults)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--jobs", type=int, default=1, help="evaluation worker limit (current evaluators run sequentially)")
        p.add_argument("--out", default=".", help="output directory")
        if mode:
            p.add_argument("--mode", choices=("full", "role_only", "weight_only"), default=None)

    p = sub.add_parser("optimize", help="run the alternating optimization loop")
    common(p, mode=True)
    p.add_argument("--pool", help="expert pool directory (manifest.json + expert files)")
    p.add_argument("--checkpoint", help="file to write a resumable checkpoint to each iteration")
    p.add_argument("--resume", help="checkpoint file to resume from")
    p.set_defaults(handler=cmd_optimize)

    p = sub.add_parser("decode", help="decode one adjacency matrix into a DAG")
    p.add_argument("--matrix", required=True, help="JSON file: [[...]] or {\"matrix\": [[...]]}")
    p.add_argument("--top-p", type=float, default=0.8, dest="top_p")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="optional output file")
    p.set_defaults(handler=cmd_decode)

    p = sub.add_parser("evaluate", help="execute a saved system on a JSONL dataset")
    p.add_argument("--system", required=True, help="best_system.json file")
    p.add_argument("--dataset", required=True, help="JSONL of {input, answer} items")
    p.add_argument("--out", help="optional output file")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("analyze", help="bucket metrics from correctness files")
    common(p)
    p.add_argument("--correctness", required=True, help="JSON with per_expert_correct and system_correct")
    p.add_argument("--trace", help="trace.jsonl to convert into metrics.csv")
    p.add_argument("--ablation", help="JSON with wo_role, wo_weight, role_baseline_avg, weight_baseline_avg")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("sweep", help="random hyperparameter draws from the preset grid")
    common(p, mode=True)
    p.add_argument("--runs", type=int, default=50)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("serve-stub", help="start the echo stub server for remote-mode tests")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.set_defaults(handler=cmd_serve_stub)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
        print(json.dumps({"error": {"type": "UsageError", "message": "--jobs must be >= 1"}}), file=sys.stderr)
        return 2
    try:
        return args.handler(args)
    except BrokenPipeError:
        raise
    except Exception as exc:  # CLI boundary: every failure becomes error JSON
        print(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
            file=sys.stderr,
        )
        return 1


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
