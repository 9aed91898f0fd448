"""Deterministic seed derivation for parallel-safe replication.

Every unit of Monte Carlo work (one error draw, one sampled graph) gets its
own 64-bit seed, derived as a stable hash of the master seed and the unit's
index path. Streams therefore never depend on execution order or on how
work is split across threads, and the same (master_seed, path) always
yields the same variates on any platform.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed", "rng_for"]


def derive_seed(master_seed: int, *path: int) -> int:
    """Stable 64-bit seed from a master seed and integer index path."""
    key = "/".join(str(int(p)) for p in (master_seed, *path))
    return int(hashlib.sha256(key.encode("ascii")).hexdigest()[:16], 16)


def rng_for(master_seed: int, *path: int) -> np.random.Generator:
    """Fresh generator for the work unit addressed by the index path."""
    return np.random.default_rng(derive_seed(master_seed, *path))
