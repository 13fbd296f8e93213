"""Deterministic seed derivation for reproducible experiments.

All randomness in this package flows through numpy's PCG64 generator seeded
with an explicit 64-bit integer (``numpy.random.default_rng(seed)``).
Parallel or repeated tasks never share a generator; each task derives its
own 64-bit seed from a master seed and a label path:

    seed = first 8 bytes (big endian) of SHA-256("part0/part1/...")

The derivation depends only on the labels, not on execution order, so
removing one task from a batch never changes another task's stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed", "rng_from", "MAX_SEED"]

MAX_SEED = 2**64 - 1


def derive_seed(*parts) -> int:
    """A 64-bit seed from a label path, stable across runs and platforms."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_from(*parts) -> np.random.Generator:
    """PCG64 generator for the substream named by the label path."""
    return np.random.default_rng(derive_seed(*parts))
