"""Greedy MMD thinning of a sample pool under the energy kernel.

Round i+1 appends the candidate j minimizing the squared MMD between the
empirical measure of the selection-so-far plus j and the empirical measure
of the full pool. Dropping selection-independent terms and rescaling, that
argmin is

    argmin_j  2 * S_i(j) + k(j, j) - (2 (i + 1) / T) * R(j)

where S_i(j) = sum of k(x_j, picked) over the current selection and
R(j) = sum_t k(x_j, x_t) over the pool. S is updated incrementally after
every pick, so the loop is O(m T) after the O(T^2) Gram matrix. Indices
may repeat (the selection is an empirical measure, not a subset).
"""

from __future__ import annotations

import numpy as np

from .kernels import energy_kernel


def mmd_thin(pool: np.ndarray, m: int) -> np.ndarray:
    """Indices of the m greedy picks from pool.

    Ties break to the lowest index. Candidates tied in exact arithmetic
    (symmetric pools) come out of floating point separated by
    summation-order noise, so anything within a small relative envelope
    of the minimum counts as tied.
    """
    pool = np.atleast_2d(np.asarray(pool, dtype=np.float64))
    t = pool.shape[0]
    if t == 0:
        raise ValueError("cannot thin an empty pool")
    if m < 1:
        raise ValueError(f"thinning target must be >= 1, got {m}")

    gram = energy_kernel(pool, pool)
    diag = np.diag(gram).copy()
    r = gram.sum(axis=1)
    s = np.zeros(t)
    picks = np.empty(m, dtype=np.int64)
    for i in range(m):
        objective = 2.0 * s + diag - (2.0 * (i + 1) / t) * r
        lo = float(objective.min())
        tol = 1e-9 * max(1.0, float(np.abs(objective).max()))
        j = int(np.flatnonzero(objective <= lo + tol)[0])
        picks[i] = j
        s += gram[:, j]
    return picks


def thin_samples(pool: np.ndarray, m: int) -> np.ndarray:
    """The thinned sample rows themselves."""
    return np.atleast_2d(pool)[mmd_thin(pool, m)]
