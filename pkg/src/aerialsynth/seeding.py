"""Deterministic seed derivation for reproducible pipeline stages.

Child seeds are hash-derived (not Python `hash()`, which is salted per
process) so results are stable across processes, platforms, and runs.
Deriving per-label sub-seeds means adding a class or an output ordinal never
perturbs any other stream.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, *parts: str | int) -> int:
    """Derive a 64-bit child seed from a master seed and a label path."""
    key = ":".join([str(int(master)), *(str(p) for p in parts)])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def make_rng(seed: int, *parts: str | int) -> np.random.Generator:
    """Generator seeded from (seed, *parts); independent per label path."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *parts)))
