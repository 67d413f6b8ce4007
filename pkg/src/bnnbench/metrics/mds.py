"""Classical (Torgerson) multidimensional scaling.

Double-center the squared distance matrix, eigendecompose, and embed with
the leading positive eigenpairs. Negative eigenvalues (the distances need
not be Euclidean) are truncated; their relative mass is reported as the
distortion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MdsResult:
    coords: np.ndarray       # (n, dim)
    eigenvalues: np.ndarray  # all eigenvalues, descending
    distortion: float        # |negative eigenvalue mass| / total |mass|


def classical_mds(dist: np.ndarray, dim: int = 2) -> MdsResult:
    """Embed a symmetric zero-diagonal distance matrix into dim coordinates.

    If fewer than dim positive eigenvalues exist, the trailing coordinates
    are zero.
    """
    d = np.asarray(dist, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got {d.shape}")
    n = d.shape[0]
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not np.allclose(d, d.T, atol=1e-12):
        raise ValueError("distance matrix must be symmetric")
    if not np.allclose(np.diag(d), 0.0, atol=1e-12):
        raise ValueError("distance matrix must have a zero diagonal")
    if (d < 0).any():
        raise ValueError("distances must be nonnegative")

    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ (d * d) @ j
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]

    coords = np.zeros((n, dim))
    k = min(dim, int((vals > 0).sum()))
    if k > 0:
        coords[:, :k] = vecs[:, :k] * np.sqrt(vals[:k])
    total = float(np.abs(vals).sum())
    distortion = float(np.abs(vals[vals < 0]).sum() / total) if total > 0 else 0.0
    return MdsResult(coords, vals, distortion)
