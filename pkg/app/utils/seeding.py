"""
Deterministic seed derivation and counter-based random streams.

Every random stream in the engine is keyed by a master seed plus a
descriptor (replicate index, simulation cell, replication index). Streams
never depend on execution order or on how work is split across workers.
"""

import hashlib
import json
from typing import Any

import numpy as np

SEED_BITS = 63


def derive_seed(master_seed: int, *descriptor: Any) -> int:
    """Hash a master seed and a JSON-serializable descriptor into a child seed"""
    payload = json.dumps([int(master_seed), list(descriptor)], sort_keys=True, default=str)
    digest = hashlib.blake2b(payload.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> (64 - SEED_BITS)


def stream(seed: int, *counter: int) -> np.random.Generator:
    """Philox generator keyed by (seed, counter...)"""
    entropy = [int(seed)] + [int(c) for c in counter]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
