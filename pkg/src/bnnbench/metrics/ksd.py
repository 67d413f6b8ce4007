"""Kernel Stein discrepancy with the inverse multiquadric kernel.

For k(x, y) = c^(-1/2) with c = 1 + ||x - y||^2 / l^2 and score function
s(x) = -grad U(x), the Stein kernel is

    k0(x, y) = <grad_x, grad_y> k          (trace term)
             + <s(x), grad_y k> + <s(y), grad_x k>
             + <s(x), s(y)> k

with grad_x k = -(x - y) / l^2 * c^(-3/2) and
<grad_x, grad_y> k = d / l^2 * c^(-3/2) - 3 ||x - y||^2 / l^4 * c^(-5/2).
The discrepancy is the square root of the V-statistic mean of k0, clamped
at zero.
"""

from __future__ import annotations

import numpy as np


def ksd_imq(samples: np.ndarray, scores: np.ndarray, lengthscale: float) -> float:
    """KSD of a sample set given score evaluations at each sample.

    Args:
        samples: (n, d) sample rows.
        scores: (n, d) score function values, s(x) = -grad U(x).
        lengthscale: IMQ lengthscale, must be positive.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    s = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    if x.shape != s.shape:
        raise ValueError(f"samples {x.shape} and scores {s.shape} must match")
    if x.shape[0] == 0:
        raise ValueError("KSD needs at least one sample")
    if lengthscale <= 0:
        raise ValueError(f"lengthscale must be positive, got {lengthscale}")
    n, d = x.shape
    l2 = lengthscale ** 2

    # everything reduces to three Gram matrices
    xx = x @ x.T
    sx = s @ x.T  # sx[i, j] = <s_i, x_j>
    ss = s @ s.T
    dx = np.diag(xx)
    r2 = np.maximum(dx[:, None] + dx[None, :] - 2.0 * xx, 0.0)
    c = 1.0 + r2 / l2
    c32 = c ** -1.5

    trace = d / l2 * c32 - 3.0 * r2 / l2 ** 2 * c ** -2.5
    su_i = np.diag(sx)[:, None] - sx          # <s_i, x_i - x_j>
    su_j = sx.T - np.diag(sx)[None, :]        # <s_j, x_i - x_j>
    cross = (su_i - su_j) / l2 * c32
    stein = trace + cross + ss * c ** -0.5
    return float(np.sqrt(max(stein.mean(), 0.0)))


def score_from_target(target, samples: np.ndarray) -> np.ndarray:
    """Evaluate s(x) = -grad U(x) row-wise."""
    return -np.stack([target.grad(w) for w in np.atleast_2d(samples)])
