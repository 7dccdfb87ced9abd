"""Deterministic seed derivation for reproducible simulation campaigns.

A single master seed is expanded, via counter-based splitting, into
independent per-purpose streams.  Each (sweep point, replication) pair
owns a block of four 64-bit seeds, one per purpose, so that e.g. changing
the update schedule never perturbs the generated graph, and appending
sweep points never reshuffles the replications of existing points.
"""

from __future__ import annotations

import numpy as np

# Purpose slots within one replication's seed block.
GRAPH = 0  # graph generation
SELECTION = 1  # which agent updates next
TIEBREAK = 2  # random choice among tied majority currencies
WEIGHTS = 3  # agent weight assignment

_N_PURPOSES = 4


def run_seeds(master_seed: int, point_index: int = 0, replication_index: int = 0) -> tuple[int, int, int, int]:
    """Derive the four per-purpose 64-bit seeds for one replication.

    The mixing function is ``SeedSequence(master_seed,
    spawn_key=(point_index, replication_index))`` expanded to four words;
    it depends only on its three integer arguments.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(point_index, replication_index))
    state = ss.generate_state(_N_PURPOSES, np.uint64)
    return tuple(int(s) for s in state)


def stream(seed: int) -> np.random.Generator:
    """A fresh PCG64 generator for one purpose seed."""
    return np.random.default_rng(seed)
