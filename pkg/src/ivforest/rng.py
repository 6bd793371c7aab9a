"""Deterministic random streams built on the counter-based Philox generator.

Every source of randomness in the package draws from a stream keyed by a
SHA-256 hash over a tag and the relevant integers, so any job (a simulated
dataset, a split, one tree of one forest, one benchmark replication) can be
reproduced in isolation. Documented streams:

    ("simulate", setting, n, seed)      dataset generation
    ("split", seed)                     train/test partition
    ("tree", seed, component, t)        bootstrap + node feature subsets
    ("rep", master_seed, setting, n, rep)  per-replication seed derivation
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_key(*parts) -> np.ndarray:
    """128-bit Philox key derived from the stream tag and integer parts."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64).copy()


def derive_seed(*parts) -> int:
    """Stable unsigned 64-bit integer derived from the parts."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def stream(*parts) -> np.random.Generator:
    """Independent generator for the stream named by ``parts``."""
    return np.random.Generator(np.random.Philox(key=derive_key(*parts)))
