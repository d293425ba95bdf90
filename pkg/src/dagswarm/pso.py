"""Particle swarm step over fixed-shape real tensors.

One velocity rule serves both search spaces: adjacency matrices and expert
parameter vectors. Each particle blends four pulls (inertia, personal best,
global best, repulsion from the global worst) with per-particle scalar
randomness, normalized so the weights sum to one, then takes a step of
length ``step_length`` along the blended velocity.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

# Hyperparameter presets searched in the reference experiments.
GRID = {
    "inertia": (0.1, 0.2, 0.3),
    "cognitive": (0.1, 0.2, 0.3, 0.4, 0.5),
    "social": (0.2, 0.3, 0.4, 0.5, 0.6),
    "repel": (0.01, 0.05, 0.1),
    "step_length": (0.5, 0.6, 0.7, 0.8, 0.9, 1.0),
}

_REDRAW_LIMIT = 8


@dataclass(frozen=True)
class PsoHyperparams:
    step_length: float = 0.8
    inertia: float = 0.2
    cognitive: float = 0.3
    social: float = 0.5
    repel: float = 0.05

    def __post_init__(self):
        coeffs = (self.inertia, self.cognitive, self.social, self.repel)
        if any(c < 0 for c in coeffs):
            raise ValueError("pso coefficients must be >= 0")
        if not any(c > 0 for c in coeffs):
            raise ValueError("at least one pso coefficient must be > 0")
        if self.step_length <= 0:
            raise ValueError("step_length must be > 0")

    def in_grid(self) -> bool:
        return (
            self.inertia in GRID["inertia"]
            and self.cognitive in GRID["cognitive"]
            and self.social in GRID["social"]
            and self.repel in GRID["repel"]
            and self.step_length in GRID["step_length"]
        )


def sample_grid_hyperparams(rng: np.random.Generator) -> PsoHyperparams:
    """Uniform draw from the preset grid."""
    pick = {name: values[rng.integers(len(values))] for name, values in GRID.items()}
    return PsoHyperparams(**pick)


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    personal_best: np.ndarray
    personal_best_score: float = -np.inf

    @classmethod
    def at(cls, position: np.ndarray) -> "Particle":
        pos = np.asarray(position, dtype=float)
        return cls(pos.copy(), np.zeros_like(pos), pos.copy())


@dataclass
class SwarmState:
    global_best: np.ndarray | None = None
    global_best_score: float = -np.inf
    global_worst: np.ndarray | None = None
    global_worst_score: float = np.inf

    @classmethod
    def empty(cls) -> "SwarmState":
        return cls()


def _draw_coefficients(hp: PsoHyperparams, rng) -> tuple[float, float, float, float, float]:
    # C > 0 required by the normalization; all-zero draws are retried.
    for _ in range(_REDRAW_LIMIT):
        r_v, r_p, r_g, r_w = (float(x) for x in rng.random(4))
        a_v = r_v * hp.inertia
        a_p = r_p * hp.cognitive
        a_g = r_g * hp.social
        a_w = r_w * hp.repel
        c = a_v + a_p + a_g + a_w
        if c > 0.0:
            return a_v, a_p, a_g, a_w, c
    raise ArithmeticError("pso coefficient draw degenerate: C == 0 after retries")


def pso_step(
    particles: list[Particle],
    scores: list[float],
    state: SwarmState,
    hp: PsoHyperparams,
    rng: np.random.Generator,
) -> tuple[list[Particle], SwarmState, int]:
    """Advance every particle once.

    ``scores[i]`` is the utility of ``particles[i].position`` as passed in.
    Personal and global records are updated from those scored positions
    first; all particles then move in parallel from a snapshot of the
    global best and worst. Returns the updated swarm, the updated state and
    the index of the best input score (ties to the lowest index).
    """
    if len(scores) != len(particles):
        raise ValueError("scores and particles length mismatch")
    if not particles:
        raise ValueError("empty swarm")
    shape = particles[0].position.shape
    for part in particles:
        if part.position.shape != shape or part.velocity.shape != shape:
            raise ValueError("inhomogeneous particle shapes")

    updated = []
    best = state.global_best
    best_score = state.global_best_score
    worst = state.global_worst
    worst_score = state.global_worst_score
    for part, score in zip(particles, scores):
        score = float(score)
        if score > part.personal_best_score:
            part = replace(part, personal_best=part.position.copy(), personal_best_score=score)
        if score > best_score:
            best_score = score
            best = part.position.copy()
        if score < worst_score:
            worst_score = score
            worst = part.position.copy()
        updated.append(part)

    new_state = SwarmState(best, best_score, worst, worst_score)
    g = best
    g_w = worst
    moved = []
    for part in updated:
        a_v, a_p, a_g, a_w, c = _draw_coefficients(hp, rng)
        velocity = (
            a_v * part.velocity
            + a_p * (part.personal_best - part.position)
            + a_g * (g - part.position)
            - a_w * (g_w - part.position)
        ) / c
        position = part.position + hp.step_length * velocity
        moved.append(replace(part, position=position, velocity=velocity))

    best_index = int(np.argmax(scores))
    return moved, new_state, best_index
