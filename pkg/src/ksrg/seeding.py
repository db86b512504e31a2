"""Per-replicate seed derivation and the replicate worker pool."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def derive_seed(master: int, replicate_index: int) -> int:
    """SplitMix64 step: seed of replicate ``replicate_index`` under ``master``."""
    z = (int(master) + (int(replicate_index) + 1) * GOLDEN) & MASK64
    z ^= z >> 30
    z = (z * MIX1) & MASK64
    z ^= z >> 27
    z = (z * MIX2) & MASK64
    z ^= z >> 31
    return z


def derive_seeds(master: int, indices) -> np.ndarray:
    """Vectorised :func:`derive_seed` (uint64 wrap-around arithmetic)."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(int(master) & MASK64) + (idx + np.uint64(1)) * np.uint64(GOLDEN)
        z ^= z >> np.uint64(30)
        z *= np.uint64(MIX1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(MIX2)
        z ^= z >> np.uint64(31)
    return z


def replicate_streams(seed: int):
    """Independent (vertex, edge) seed material for one replicate."""
    return [int(seed), 0], [int(seed), 1]


def default_threads() -> int:
    env = os.environ.get("KSRG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_replicates(task, n_tasks: int, master_seed: int, threads: int = 1, offset: int = 0):
    """Evaluate ``task(index, seed)`` for index in range(n_tasks); results in index order.

    Each index gets ``derive_seed(master_seed, offset + index)``, so the outcome
    does not depend on ``threads``.
    """
    seeds = [derive_seed(master_seed, offset + i) for i in range(n_tasks)]
    if threads <= 1 or n_tasks <= 1:
        return [task(i, s) for i, s in enumerate(seeds)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(task, range(n_tasks), seeds))
