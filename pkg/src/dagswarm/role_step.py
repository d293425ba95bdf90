"""One structure-search round over a swarm of adjacency matrices.

Each matrix is decoded once, executed with the identity assignment and
scored; optional sparsity shaping (threshold pruning before decoding, or an
L1 penalty on the score) steers the search toward fewer edges. The swarm
then advances by one PSO step and positions are clamped back to [0, 1] to
keep the likelihood reading of the entries.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .executor import Assignment
from .graph import DagStructure, decode_dag, prune_threshold
from .pso import Particle, PsoHyperparams, SwarmState, pso_step
from .rng import RngFactory
from .utilities import UtilityFunction

TAU_PRESETS = (0.05, 0.1, 0.2)
L1_PRESETS = (0.01, 0.05, 0.1)

SPARSITY_MODES = ("none", "threshold", "l1")


@dataclass(frozen=True)
class SparsityConfig:
    mode: str = "none"
    tau: float = 0.0
    l1_coeff: float = 0.0

    def __post_init__(self):
        if self.mode not in SPARSITY_MODES:
            raise ValueError(f"sparsity mode must be one of {SPARSITY_MODES}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")
        if self.l1_coeff < 0.0:
            raise ValueError("l1_coeff must be >= 0")


def shaped_utility(raw: float, A: np.ndarray, cfg: SparsityConfig) -> float:
    """L1 mode subtracts a sparsity penalty from the raw utility."""
    if cfg.mode == "l1":
        return raw - cfg.l1_coeff * float(np.sum(np.abs(A)))
    return raw


@dataclass
class RoleRecord:
    """Best structure seen so far: the matrix, the exact DAG its score used, the raw utility."""

    matrix: np.ndarray
    dag: DagStructure
    utility: float


@dataclass
class Swarm:
    particles: list[Particle]
    state: SwarmState

    @classmethod
    def from_positions(cls, positions) -> "Swarm":
        return cls([Particle.at(p) for p in positions], SwarmState.empty())


def role_step(
    swarm: Swarm,
    pool,
    assignment: Assignment,
    utility: UtilityFunction,
    sparsity: SparsityConfig,
    hp: PsoHyperparams,
    top_p: float,
    rng: RngFactory,
    iteration: int = 0,
    record: RoleRecord | None = None,
) -> tuple[Swarm, RoleRecord]:
    """Decode, score and advance the matrix swarm; track the best raw utility.

    The record keeps the decoded DAG that produced its score (never
    re-decoded) so downstream consumers see exactly the structure that was
    evaluated. Threshold pruning applies to a decode-time view only; stored
    matrices are never mutated by it.
    """
    if not swarm.particles:
        raise ValueError("empty matrix swarm")
    raw_scores = []
    shaped_scores = []
    for i, particle in enumerate(swarm.particles):
        matrix = particle.position
        view = prune_threshold(matrix, sparsity.tau) if sparsity.mode == "threshold" else matrix
        dag = decode_dag(view, top_p, rng.stream("decode", iteration, i))
        try:
            raw = float(utility.evaluate(dag, assignment, pool))
        except Exception as exc:  # noqa: BLE001 - annotate with the particle
            raise RuntimeError(f"utility evaluation failed for particle {i}") from exc
        raw_scores.append(raw)
        shaped_scores.append(shaped_utility(raw, matrix, sparsity))
        if record is None or raw > record.utility:
            record = RoleRecord(matrix.copy(), dag, raw)

    particles, state, _ = pso_step(
        swarm.particles, shaped_scores, swarm.state, hp, rng.stream("role_pso", iteration)
    )
    for particle in particles:
        np.clip(particle.position, 0.0, 1.0, out=particle.position)
    return Swarm(particles, state), record
