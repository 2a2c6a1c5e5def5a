"""Bundled synthetic datasets: grid patterns and an imbalanced fixture.

Nothing here touches network or disk; both generators are pure functions
of their arguments, so any dataset they produce can be regenerated from
a seed.
"""

from __future__ import annotations

import numpy as np

from .data import LABEL_BITS, ClassLabel, Dataset
from .seeding import STREAM_FIXTURE, spawn_rng

DEFAULT_MINORITY_FRACTION = 0.141
DEFAULT_FLIP_PROB = 0.4
DEFAULT_FEATURE_WIDTH = 62


def bars_and_stripes(rows: int, cols: int) -> np.ndarray:
    """All distinct bar (column) and stripe (row) patterns on a grid.

    Returns a (count, rows*cols) uint8 matrix; for a 4x4 grid that is 30
    patterns (2^4 of each orientation, minus the two shared all-0/all-1
    grids).
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid must have at least one row and one column")
    pats = []
    for mask in range(2 ** rows):
        grid = np.zeros((rows, cols), dtype=np.uint8)
        for r in range(rows):
            if (mask >> r) & 1:
                grid[r, :] = 1
        pats.append(grid.ravel())
    for mask in range(2 ** cols):
        grid = np.zeros((rows, cols), dtype=np.uint8)
        for c in range(cols):
            if (mask >> c) & 1:
                grid[:, c] = 1
        pats.append(grid.ravel())
    return np.unique(np.stack(pats), axis=0)


def class_templates(n_features: int = DEFAULT_FEATURE_WIDTH) -> tuple[np.ndarray, np.ndarray]:
    """Prototype feature rows: benign is banded, attack is pinstriped."""
    idx = np.arange(n_features)
    benign = ((idx // 8) % 2 == 0).astype(np.uint8)
    attack = (idx % 2 == 0).astype(np.uint8)
    return benign, attack


def imbalanced_fixture(n_records: int,
                       minority_fraction: float = DEFAULT_MINORITY_FRACTION,
                       flip_prob: float = DEFAULT_FLIP_PROB,
                       n_features: int = DEFAULT_FEATURE_WIDTH,
                       seed: int = 0) -> Dataset:
    """Labelled two-class records with a configurable class imbalance.

    Each record is its class template with every feature bit flipped
    independently with probability flip_prob, followed by the exact
    two-bit class code. Attack is the minority class; record order is
    shuffled. flip_prob controls how far the classes overlap: 0 gives
    trivially separable data, 0.5 erases the classes entirely.
    """
    if n_records < 2:
        raise ValueError("need at least two records")
    if not 0 < minority_fraction < 0.5:
        raise ValueError(f"minority_fraction must lie in (0, 0.5), got {minority_fraction}")
    if not 0 <= flip_prob < 0.5:
        raise ValueError(f"flip_prob must lie in [0, 0.5), got {flip_prob}")
    rng = spawn_rng(seed, STREAM_FIXTURE)
    n_attack = max(1, round(n_records * minority_fraction))
    n_benign = n_records - n_attack
    benign_t, attack_t = class_templates(n_features)

    def emit(template, label, count):
        feats = np.tile(template, (count, 1))
        feats ^= (rng.random(feats.shape) < flip_prob).astype(np.uint8)
        tail = np.tile(np.asarray(LABEL_BITS[label], dtype=np.uint8), (count, 1))
        return np.hstack([feats, tail])

    records = np.concatenate([emit(benign_t, ClassLabel.BENIGN, n_benign),
                              emit(attack_t, ClassLabel.ATTACK, n_attack)])
    return Dataset(records[rng.permutation(n_records)])
