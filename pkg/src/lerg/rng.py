"""Deterministic randomness.

A single 64-bit master seed drives every randomized operation. Substreams
are derived by key, not by draw order, so results do not depend on the
order in which independent pieces of work are scheduled.
"""

from __future__ import annotations

import hashlib

import numpy as np


def seeded_rng(seed: int) -> np.random.Generator:
    """Return a deterministic generator for a 64-bit seed.

    Identical seeds yield identical streams; seed 0 is valid.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def derive_rng(seed: int, *key: int | str) -> np.random.Generator:
    """Return an independent substream for (seed, key).

    String key parts are hashed, so a substream keyed by an example id is
    stable under corpus reordering. Integer parts are used as-is.
    """
    parts: list[int] = []
    for item in key:
        if isinstance(item, str):
            digest = hashlib.sha256(item.encode("utf-8")).digest()
            parts.append(int.from_bytes(digest[:8], "big"))
        else:
            parts.append(int(item) & 0xFFFFFFFFFFFFFFFF)
    seq = np.random.SeedSequence(entropy=seed, spawn_key=tuple(parts))
    return np.random.Generator(np.random.PCG64(seq))


def stable_seed(seed: int, *key: int | str) -> int:
    """Fold (seed, key) into one 64-bit integer seed.

    Used where a component wants a plain integer seed of its own (for
    example a per-example sampling plan) while staying order-invariant.
    """
    h = hashlib.sha256(str(seed).encode("utf-8"))
    for item in key:
        h.update(b"\x1f")
        h.update(str(item).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")
