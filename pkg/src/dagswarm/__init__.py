"""Joint structure and parameter search for multi-expert systems.

A swarm over continuous adjacency matrices is decoded into executable
DAGs (role step) while a second swarm tunes the expert parameter vectors
behind the best structure found so far, scored by frequency-weighted
contribution estimates (weight step). Synthetic evaluators keep
everything desk-scale; a remote HTTP evaluator plugs real models in.
"""
from __future__ import annotations

from .executor import (
    AffineEvaluator,
    Assignment,
    ExecutionError,
    Message,
    NodeEvaluator,
    execute,
    node_role,
)
from .graph import DagStructure, decode_dag, init_adjacency_swarm, prune_threshold, top_p_sample
from .metrics import (
    BucketTable,
    ablation_consistent,
    analysis_report,
    bucketize,
    collaborative_gain,
    solved_from_zero_rate,
    trace_csv,
)
from .orchestrate import (
    OptimizedSystem,
    RunConfig,
    RunTrace,
    TraceRow,
    config_from_dict,
    dropout_gate,
    load_checkpoint,
    optimize,
)
from .pool import ExpertPool, build_pool, load_pool, save_pool
from .pso import (
    GRID,
    Particle,
    PsoHyperparams,
    SwarmState,
    pso_step,
    sample_grid_hyperparams,
)
from .remote import PROMPT_PREAMBLES, RemoteEvaluator, StubServer, build_prompt
from .rng import RngFactory
from .role_step import RoleRecord, SparsityConfig, Swarm, role_step, shaped_utility
from .utilities import (
    AffineTargetUtility,
    ConstantUtility,
    DagRecoveryUtility,
    DatasetUtility,
    UtilityFunction,
    build_utility,
    chain_dag,
    diamond_dag,
    edit_distance,
    load_dataset,
    make_affine_task,
    normalized_edit_distance,
    star_dag,
)
from .weight_step import (
    ContributionReport,
    assignment_counts,
    contribution_scores,
    sample_assignments,
    weight_step,
)

__version__ = "0.1.0"

__all__ = [
    "AffineEvaluator",
    "AffineTargetUtility",
    "Assignment",
    "BucketTable",
    "ConstantUtility",
    "ContributionReport",
    "DagRecoveryUtility",
    "DagStructure",
    "DatasetUtility",
    "ExecutionError",
    "ExpertPool",
    "GRID",
    "Message",
    "NodeEvaluator",
    "OptimizedSystem",
    "PROMPT_PREAMBLES",
    "Particle",
    "PsoHyperparams",
    "RemoteEvaluator",
    "RngFactory",
    "RoleRecord",
    "RunConfig",
    "RunTrace",
    "SparsityConfig",
    "StubServer",
    "Swarm",
    "SwarmState",
    "TraceRow",
    "UtilityFunction",
    "ablation_consistent",
    "analysis_report",
    "assignment_counts",
    "bucketize",
    "build_pool",
    "build_prompt",
    "build_utility",
    "chain_dag",
    "collaborative_gain",
    "config_from_dict",
    "contribution_scores",
    "decode_dag",
    "diamond_dag",
    "dropout_gate",
    "edit_distance",
    "execute",
    "init_adjacency_swarm",
    "load_checkpoint",
    "load_dataset",
    "load_pool",
    "make_affine_task",
    "node_role",
    "normalized_edit_distance",
    "optimize",
    "prune_threshold",
    "pso_step",
    "role_step",
    "sample_assignments",
    "sample_grid_hyperparams",
    "save_pool",
    "shaped_utility",
    "solved_from_zero_rate",
    "star_dag",
    "top_p_sample",
    "trace_csv",
    "weight_step",
]
