"""Kernel functions shared by the discrepancy metrics.

Two kernels are used: the energy (distance-induced) kernel
k(x, y) = ||x|| + ||y|| - ||x - y|| for MMD, and the inverse multiquadric
k(x, y) = (1 + ||x - y||^2 / l^2)^(-1/2) for Stein discrepancies. The IMQ
exponent is applied to the squared-distance form; set squared=False for
the variant that squares the whole (1 + ||x - y|| / l) expression instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist


def energy_kernel(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Energy kernel Gram matrix between sample rows of a and b."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    return na[:, None] + nb[None, :] - cdist(a, b)


@dataclass(frozen=True)
class ImqKernel:
    """Inverse multiquadric kernel with lengthscale l.

    squared=True applies the -1/2 exponent to 1 + r^2 / l^2 (the smooth
    form whose Stein derivatives are implemented); squared=False applies
    it to 1 + r / l, which is not differentiable at r = 0 and is kept only
    for Gram-matrix comparisons.
    """

    lengthscale: float
    squared: bool = True

    def __post_init__(self):
        if self.lengthscale <= 0:
            raise ValueError(f"lengthscale must be positive, got {self.lengthscale}")

    def gram(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        r = cdist(np.atleast_2d(a), np.atleast_2d(b))
        if self.squared:
            return (1.0 + (r / self.lengthscale) ** 2) ** -0.5
        return (1.0 + r / self.lengthscale) ** -0.5


def median_heuristic(samples: np.ndarray, max_points: int = 1000,
                     seed: int = 0) -> float:
    """Median pairwise distance over a fixed-seed subsample.

    Used to set the IMQ lengthscale. Raises if the median is zero (all
    subsampled points identical).
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    n = samples.shape[0]
    if n < 2:
        raise ValueError("median heuristic needs at least 2 samples")
    if n > max_points:
        idx = np.random.default_rng(seed).choice(n, size=max_points, replace=False)
        samples = samples[idx]
    med = float(np.median(pdist(samples)))
    if med <= 0.0:
        raise ValueError("median pairwise distance is zero; degenerate sample")
    return med
