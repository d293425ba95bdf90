"""Deterministic random stream derivation.

Every stochastic component draws from its own stream, derived from the run
seed plus a purpose label and integer coordinates (iteration, particle, ...).
Streams are independent of consumption order elsewhere, so checkpoint resume
and cross-mode comparisons see identical draws without tracking generator
cursors.
"""
from __future__ import annotations

import numpy as np

# Stable purpose codes; never renumber, only append.
_PURPOSES = {
    "init_matrices": 0,
    "init_experts": 1,
    "decode": 2,
    "role_pso": 3,
    "assignments": 4,
    "weight_pso": 5,
    "dropout": 6,
    "task": 7,
    "sweep": 8,
}


class RngFactory:
    """Dispenses named substreams of a single root seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def stream(self, purpose: str, *key: int) -> np.random.Generator:
        if purpose not in _PURPOSES:
            raise ValueError(f"unknown rng purpose: {purpose!r}")
        spawn_key = (_PURPOSES[purpose],) + tuple(int(k) for k in key)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=spawn_key))
