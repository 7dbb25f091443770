"""Deterministic seed derivation for reproducible parallel experiments.

Every random draw in the package is keyed off a master seed through
``numpy.random.SeedSequence`` spawn keys, so trials, iterations, and weight
initialisations get independent streams that do not depend on execution
order or worker count.
"""

from __future__ import annotations

import numpy as np

# Spawn-key name spaces.  Keeping them distinct guarantees that e.g. the
# noise stream of iteration 0 never collides with the weight-init stream.
KEY_NOISE = 0
KEY_WEIGHTS = 1
KEY_HEATMAP = 2

SeedLike = int | np.random.SeedSequence


def child_sequence(seed: SeedLike, *key: int) -> np.random.SeedSequence:
    """Derive a child SeedSequence from ``seed`` and an integer key path."""
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
        base_key = tuple(seed.spawn_key)
    else:
        entropy = int(seed)
        base_key = ()
    return np.random.SeedSequence(entropy, spawn_key=base_key + tuple(int(k) for k in key))


def child_seed(seed: SeedLike, *key: int) -> int:
    """Derive a single 64-bit integer seed (loggable, replayable)."""
    return int(child_sequence(seed, *key).generate_state(1, np.uint64)[0])


def rng_from(seed: SeedLike, *key: int) -> np.random.Generator:
    """Generator seeded from the derived child sequence."""
    return np.random.default_rng(child_sequence(seed, *key))
