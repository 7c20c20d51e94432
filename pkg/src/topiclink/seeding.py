"""Deterministic seed derivation.

Every nested computation (ensemble members, tree children, CV folds) gets
its own seed derived from the parent seed plus a structural key, so that
parallel scheduling or re-ordering cannot change results.
"""

import hashlib

import numpy as np

_SEED_SPACE = 2**63


def derive_seed(seed: int, *parts) -> int:
    """Mix a base seed with structural key parts into a new 63-bit seed.

    Uses SHA-256 so the derivation is stable across platforms and Python
    processes (unlike the builtin ``hash``).
    """
    key = "|".join([str(int(seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % _SEED_SPACE


def rng_for(seed: int, *parts) -> np.random.Generator:
    """Generator seeded by ``derive_seed(seed, *parts)``."""
    return np.random.default_rng(derive_seed(seed, *parts))
