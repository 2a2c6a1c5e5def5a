"""Deterministic seed routing.

Every entry point derives its generators from one user-supplied integer
seed through numpy's SeedSequence tree. Child streams are opened with
fixed integer subkeys rather than ambient entropy, so any run is
reproducible bit for bit from the seed alone.

Subkey registry (first key):
    0  parameter initialisation
    1  training loop (epoch shuffles and sampler draws, one stream)
    2  sample generation
    3  dataset splitting
    4  tie breaking (chain repair, votes)
    5  fixture synthesis

Deeper keys index parts or chains within a command, e.g. the model for
part ``i`` of an undersampling run trains under ``(1, i)``.
"""

from __future__ import annotations

import numpy as np

STREAM_INIT = 0
STREAM_TRAIN = 1
STREAM_GENERATE = 2
STREAM_SPLIT = 3
STREAM_TIEBREAK = 4
STREAM_FIXTURE = 5


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator at a fixed position in the seed tree rooted at `seed`."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def derive_seed(seed: int, *key: int) -> int:
    """64-bit child seed at a fixed tree position, for nested entry points."""
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1, np.uint64)[0])
