"""Outer optimization loop: alternate structure and parameter rounds.

Each iteration runs a role step (structure search) and then a weight step
(parameter search on the best structure), subject to the run mode and
optional dropout gating. The loop stops when the best utility has not
improved for ``patience`` consecutive iterations or the iteration cap is
reached. Per-iteration evaluator calls are audited against the
n * (N + M) * |f| budget.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .executor import Assignment
from .graph import DagStructure, decode_dag, init_adjacency_swarm
from .pool import ExpertPool
from .pso import Particle, PsoHyperparams, SwarmState
from .rng import RngFactory
from .role_step import RoleRecord, SparsityConfig, Swarm, role_step
from .utilities import UtilityFunction
from .weight_step import weight_step

MODES = ("full", "role_only", "weight_only")
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    n_experts: int = 10
    matrix_swarm_size: int = 10
    assignments_per_step: int = 10
    top_p: float = 0.8
    max_iterations: int = 20
    patience: int = 6
    role_hp: PsoHyperparams = field(default_factory=PsoHyperparams)
    weight_hp: PsoHyperparams = field(default_factory=PsoHyperparams)
    sparsity: SparsityConfig = field(default_factory=SparsityConfig)
    dropout_role: float = 0.0
    dropout_weight: float = 0.0
    mode: str = "full"
    pool_distinct: int | None = None
    pool_repeats: int = 1
    expert_dim: int = 6
    expert_scale: float = 1.0
    seed: int = 0
    utility_spec: dict = field(default_factory=lambda: {"name": "constant"})

    def __post_init__(self):
        if self.n_experts < 1 or self.matrix_swarm_size < 1 or self.assignments_per_step < 1:
            raise ValueError("n_experts, matrix_swarm_size and assignments_per_step must be >= 1")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if not (0.0 <= self.dropout_role <= 1.0 and 0.0 <= self.dropout_weight <= 1.0):
            raise ValueError("dropout probabilities must be in [0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.expert_dim < 1:
            raise ValueError("expert_dim must be >= 1")
        distinct = self.pool_distinct if self.pool_distinct is not None else self.n_experts
        if distinct * self.pool_repeats != self.n_experts:
            raise ValueError(
                f"pool spec mismatch: pool_distinct * pool_repeats = "
                f"{distinct * self.pool_repeats} != n_experts = {self.n_experts}"
            )

    @property
    def distinct(self) -> int:
        return self.pool_distinct if self.pool_distinct is not None else self.n_experts


_HP_KEYS = ("step_length", "inertia", "cognitive", "social", "repel")
_SPARSITY_KEYS = ("mode", "tau", "l1_coeff")


def config_from_dict(data: dict) -> RunConfig:
    """Build a validated RunConfig; unknown keys are rejected by name."""
    known = {f for f in RunConfig.__dataclass_fields__}
    plain = dict(data)
    for key in plain:
        if key not in known:
            raise ValueError(f"unknown config key: {key!r}")
    for hp_key in ("role_hp", "weight_hp"):
        if hp_key in plain:
            sub = plain[hp_key]
            for key in sub:
                if key not in _HP_KEYS:
                    raise ValueError(f"unknown config key: {hp_key}.{key}")
            plain[hp_key] = PsoHyperparams(**sub)
    if "sparsity" in plain:
        sub = plain["sparsity"]
        for key in sub:
            if key not in _SPARSITY_KEYS:
                raise ValueError(f"unknown config key: sparsity.{key}")
        plain["sparsity"] = SparsityConfig(**sub)
    if "utility_spec" in plain and not isinstance(plain["utility_spec"], dict):
        raise ValueError("utility_spec must be an object")
    return RunConfig(**plain)


def dropout_gate(d_r: float, d_w: float, rng: np.random.Generator) -> tuple[bool, bool]:
    """Skip each step with its dropout probability, independently.

    If both draws say skip, the step with the smaller dropout probability
    runs anyway (tie: the role step runs), so no iteration is a no-op.
    """
    if not (0.0 <= d_r <= 1.0 and 0.0 <= d_w <= 1.0):
        raise ValueError("dropout probabilities must be in [0, 1]")
    skip_role = float(rng.random()) < d_r
    skip_weight = float(rng.random()) < d_w
    if skip_role and skip_weight:
        if d_r <= d_w:
            skip_role = False
        else:
            skip_weight = False
    return not skip_role, not skip_weight


@dataclass
class TraceRow:
    iteration: int
    ran_role: bool
    ran_weight: bool
    best_role_utility: float
    best_utility: float
    best_contribution: float | None
    evaluator_calls: int
    wall_time_s: float = 0.0


@dataclass
class RunTrace:
    rows: list[TraceRow] = field(default_factory=list)

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)

    def to_jsonl(self) -> str:
        # Wall time is kept in memory only; serialized traces must be
        # byte-identical across reruns of the same config and seed.
        lines = []
        for row in self.rows:
            record = asdict(row)
            record.pop("wall_time_s")
            lines.append(json.dumps(record, sort_keys=True))
        return "\n".join(lines) + "\n"

    def write_jsonl(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())

    @property
    def total_evaluator_calls(self) -> int:
        return sum(row.evaluator_calls for row in self.rows)


@dataclass
class OptimizedSystem:
    dag: DagStructure
    assignment: Assignment
    expert_params: list[np.ndarray]
    best_utility: float
    best_role_utility: float

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "dag": self.dag.to_dict(),
            "assignment": list(self.assignment.slots),
            "experts": [[float(x) for x in vec] for vec in self.expert_params],
            "best_utility": float(self.best_utility),
            "best_role_utility": float(self.best_role_utility),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _initial_expert_positions(cfg: RunConfig, pool, rng: RngFactory) -> list[np.ndarray]:
    if pool is None:
        stream = rng.stream("init_experts")
        bases = [stream.uniform(-cfg.expert_scale, cfg.expert_scale, cfg.expert_dim) for _ in range(cfg.distinct)]
        return [bases[k].copy() for k in range(cfg.distinct) for _ in range(cfg.pool_repeats)]
    params = pool.as_list() if isinstance(pool, ExpertPool) else [np.asarray(v, dtype=float) for v in pool]
    if len(params) != cfg.n_experts:
        raise ValueError(f"pool size {len(params)} != n_experts {cfg.n_experts}")
    return params


def _serialize_swarm(swarm: Swarm) -> dict:
    state = swarm.state
    return {
        "particles": [
            {
                "position": p.position.tolist(),
                "velocity": p.velocity.tolist(),
                "personal_best": p.personal_best.tolist(),
                "personal_best_score": float(p.personal_best_score),
            }
            for p in swarm.particles
        ],
        "state": {
            "global_best": None if state.global_best is None else state.global_best.tolist(),
            "global_best_score": float(state.global_best_score),
            "global_worst": None if state.global_worst is None else state.global_worst.tolist(),
            "global_worst_score": float(state.global_worst_score),
        },
    }


def _deserialize_swarm(data: dict) -> Swarm:
    particles = [
        Particle(
            np.asarray(p["position"], dtype=float),
            np.asarray(p["velocity"], dtype=float),
            np.asarray(p["personal_best"], dtype=float),
            float(p["personal_best_score"]),
        )
        for p in data["particles"]
    ]
    s = data["state"]
    state = SwarmState(
        None if s["global_best"] is None else np.asarray(s["global_best"], dtype=float),
        float(s["global_best_score"]),
        None if s["global_worst"] is None else np.asarray(s["global_worst"], dtype=float),
        float(s["global_worst_score"]),
    )
    return Swarm(particles, state)


def save_checkpoint(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def load_checkpoint(path: str | Path) -> dict:
    payload = json.loads(Path(path).read_text())
    if payload.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version: {payload.get('format_version')}")
    return payload


def optimize(
    cfg: RunConfig,
    pool,
    utility: UtilityFunction,
    checkpoint_path: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> tuple[OptimizedSystem, RunTrace]:
    """Run the alternating loop; return the best system and the trace.

    ``pool`` may be an ExpertPool, a list of parameter vectors, or None to
    draw a fresh pool from the config's pool spec. The returned system is
    the recorded best DAG (frozen, never re-decoded) instantiated with the
    final expert parameters under the identity assignment.
    """
    n = cfg.n_experts
    rng = RngFactory(cfg.seed)
    identity = Assignment.identity(n)
    budget = n * (cfg.matrix_swarm_size + cfg.assignments_per_step) * utility.dataset_size

    if resume_from is not None:
        payload = load_checkpoint(resume_from)
        start_iteration = payload["iteration"]
        stall = payload["stall"]
        best_utility = payload["best_utility"]
        matrices = _deserialize_swarm(payload["matrix_swarm"])
        experts = _deserialize_swarm(payload["expert_swarm"])
        record = None
        if payload["record"] is not None:
            record = RoleRecord(
                np.asarray(payload["record"]["matrix"], dtype=float),
                DagStructure.from_dict(payload["record"]["dag"]),
                float(payload["record"]["utility"]),
            )
    else:
        start_iteration = 0
        stall = 0
        best_utility = -np.inf
        positions = init_adjacency_swarm(n, cfg.matrix_swarm_size, rng.stream("init_matrices"))
        matrices = Swarm.from_positions(positions)
        experts = Swarm.from_positions(_initial_expert_positions(cfg, pool, rng))
        record = None
        if cfg.mode == "weight_only":
            # Freeze the structure to the best of the initial random decodes.
            expert_positions = [p.position for p in experts.particles]
            for i, particle in enumerate(matrices.particles):
                dag = decode_dag(particle.position, cfg.top_p, rng.stream("decode", 0, i))
                raw = float(utility.evaluate(dag, identity, expert_positions))
                if record is None or raw > record.utility:
                    record = RoleRecord(particle.position.copy(), dag, raw)

    trace = RunTrace()
    for t in range(start_iteration, cfg.max_iterations):
        started = time.perf_counter()
        calls_before = utility.evaluator_calls
        previous_best = best_utility

        if cfg.mode == "full":
            run_role, run_weight = dropout_gate(
                cfg.dropout_role, cfg.dropout_weight, rng.stream("dropout", t)
            )
            if record is None and not run_role:
                run_role = True  # a weight step needs a structure to work on
        elif cfg.mode == "role_only":
            run_role, run_weight = True, False
        else:
            run_role, run_weight = False, True

        best_contribution = None
        if run_role:
            expert_positions = [p.position for p in experts.particles]
            matrices, record = role_step(
                matrices, expert_positions, identity, utility,
                cfg.sparsity, cfg.role_hp, cfg.top_p, rng, t, record,
            )
            best_utility = max(best_utility, record.utility)
        if run_weight and record is not None:
            experts, _, report = weight_step(
                experts, record.dag, utility, cfg.weight_hp, cfg.assignments_per_step, rng, t
            )
            best_contribution = float(np.max(report.scores))
            best_utility = max(best_utility, record.utility, max(report.utilities))

        calls = utility.evaluator_calls - calls_before
        if calls > budget:
            raise RuntimeError(f"evaluator budget exceeded: {calls} > {budget} calls in iteration {t}")
        stall = 0 if best_utility > previous_best else stall + 1
        trace.append(
            TraceRow(
                iteration=t,
                ran_role=run_role,
                ran_weight=run_weight,
                best_role_utility=float(record.utility) if record is not None else -np.inf,
                best_utility=float(best_utility),
                best_contribution=best_contribution,
                evaluator_calls=calls,
                wall_time_s=time.perf_counter() - started,
            )
        )

        if checkpoint_path is not None:
            save_checkpoint(
                checkpoint_path,
                {
                    "format_version": CHECKPOINT_VERSION,
                    "iteration": t + 1,
                    "seed": cfg.seed,
                    "mode": cfg.mode,
                    "stall": stall,
                    "best_utility": float(best_utility),
                    "record": None
                    if record is None
                    else {
                        "matrix": record.matrix.tolist(),
                        "dag": record.dag.to_dict(),
                        "utility": float(record.utility),
                    },
                    "matrix_swarm": _serialize_swarm(matrices),
                    "expert_swarm": _serialize_swarm(experts),
                },
            )

        if stall >= cfg.patience:
            break

    if record is None:
        raise RuntimeError("optimization produced no structure record")
    system = OptimizedSystem(
        dag=record.dag,
        assignment=identity,
        expert_params=[p.position.copy() for p in experts.particles],
        best_utility=float(best_utility),
        best_role_utility=float(record.utility),
    )
    return system, trace
