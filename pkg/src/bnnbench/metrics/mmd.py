"""Maximum mean discrepancy under the energy kernel.

With k(x, y) = ||x|| + ||y|| - ||x - y|| the norm terms cancel in the
V-statistic and the squared MMD reduces to the energy distance

    MMD^2 = 2 E||a - b|| - E||a - a'|| - E||b - b'||

with all expectations over independent empirical pairs (diagonal
included).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist


def mmd_energy(a: np.ndarray, b: np.ndarray) -> float:
    """Energy-kernel MMD between two sample sets (rows are samples)."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("MMD needs at least one sample on each side")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    cross = float(cdist(a, b).mean())
    within_a = float(cdist(a, a).mean())
    within_b = float(cdist(b, b).mean())
    sq = 2.0 * cross - within_a - within_b
    return float(np.sqrt(max(sq, 0.0)))


def mmd_matrix(sample_sets: list[np.ndarray]) -> np.ndarray:
    """Symmetric matrix of pairwise energy MMDs with a zero diagonal."""
    m = len(sample_sets)
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = mmd_energy(sample_sets[i], sample_sets[j])
    return out
