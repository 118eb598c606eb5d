"""Deterministic RNG stream derivation.

Every stochastic stage derives its own ``random.Random`` from the master seed
plus a string path (e.g. ``dialog/42`` or ``camera/store_a/3/7``). Streams are
independent of scheduling order, so parallel and serial generation agree.
"""

import hashlib
import random


def derive_seed(master_seed: int, *parts) -> int:
    """Map (master seed, label path) to a stable 64-bit child seed."""
    label = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(f"{master_seed}|{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(master_seed: int, *parts) -> random.Random:
    return random.Random(derive_seed(master_seed, *parts))
