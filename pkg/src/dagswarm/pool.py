"""Expert pools: parameter vectors with a diversity spec.

A pool of ``a`` distinct experts each repeated ``b`` times gives a * b
slots; repeats start as value copies and drift apart once weight
optimization moves them. Pools persist as a manifest plus one JSON file per
expert.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MANIFEST_NAME = "manifest.json"
FORMAT_VERSION = 1


@dataclass
class ExpertPool:
    params: list[np.ndarray]
    distinct: int
    repeats: int

    def __len__(self) -> int:
        return len(self.params)

    @property
    def dim(self) -> int:
        return self.params[0].shape[0]

    def as_list(self) -> list[np.ndarray]:
        return list(self.params)


def build_pool(
    distinct: int,
    repeats: int,
    dim: int,
    rng: np.random.Generator,
    scale: float = 1.0,
) -> ExpertPool:
    """``distinct`` vectors drawn uniform(-scale, scale), each repeated ``repeats`` times."""
    if distinct < 1 or repeats < 1:
        raise ValueError("distinct and repeats must be >= 1")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    bases = [rng.uniform(-scale, scale, dim) for _ in range(distinct)]
    params = [bases[k].copy() for k in range(distinct) for _ in range(repeats)]
    return ExpertPool(params, distinct, repeats)


def save_pool(pool: ExpertPool, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for k, vec in enumerate(pool.params):
        name = f"expert_{k:03d}.json"
        (directory / name).write_text(json.dumps([float(x) for x in vec], sort_keys=True))
        files.append(name)
    manifest = {
        "format_version": FORMAT_VERSION,
        "n_experts": len(pool),
        "dim": pool.dim,
        "distinct": pool.distinct,
        "repeats": pool.repeats,
        "files": files,
    }
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True))


def load_pool(directory: str | Path) -> ExpertPool:
    directory = Path(directory)
    manifest = json.loads((directory / MANIFEST_NAME).read_text())
    if manifest["format_version"] != FORMAT_VERSION:
        raise ValueError(f"unsupported pool format version {manifest['format_version']}")
    params = [
        np.asarray(json.loads((directory / name).read_text()), dtype=float)
        for name in manifest["files"]
    ]
    pool = ExpertPool(params, manifest["distinct"], manifest["repeats"])
    if len(pool) != manifest["n_experts"]:
        raise ValueError("manifest n_experts does not match expert files")
    return pool
