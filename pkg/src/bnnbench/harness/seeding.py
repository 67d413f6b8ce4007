"""Deterministic seed derivation for benchmark work units.

Every run in the sweep draws its RNG seed from the tuple
(master_seed, task, algorithm, hp_index, replicate) through SHA-256, so
results are independent of worker count and scheduling order. The first
8 bytes of the digest become an unsigned 64-bit seed.

Reserved algorithm names carve out the shared per-replicate work:
"data" (dataset generation, replicate 0 only), "map" (MAP training),
"hmc-tune" (step-size search) and "hmc" (the reference chains).
"""

import hashlib


def derive_seed(master_seed: int, task: str, algorithm: str,
                hp_index: int, replicate: int) -> int:
    """Unsigned 64-bit seed for one (task, algorithm, cell, replicate)."""
    payload = f"{int(master_seed)}|{task}|{algorithm}|{int(hp_index)}|{int(replicate)}"
    digest = hashlib.sha256(payload.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")
