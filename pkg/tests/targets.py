"""Analytically tractable targets used by the sampler and optimizer tests.

These satisfy the same protocol as the MLP posterior (dim, potential, grad,
stochastic_grad) but admit closed-form answers.
"""

import math

import numpy as np


class GaussianTarget:
    """Potential of N(mean, cov); stochastic gradients are exact."""

    def __init__(self, mean, cov):
        self.mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
        cov = np.asarray(cov, dtype=np.float64)
        if cov.ndim == 0:
            cov = cov[None, None]
        self.cov = cov
        self.prec = np.linalg.inv(cov)

    @property
    def dim(self):
        return len(self.mean)

    def potential(self, w):
        r = w - self.mean
        return 0.5 * float(r @ self.prec @ r)

    def grad(self, w):
        return self.prec @ (w - self.mean)

    def stochastic_grad(self, w, schedule=None, vr=None):
        return self.grad(w)


class BayesianLinearPosterior:
    """Conjugate linear regression y = x @ w + eps with prior N(0, I).

    The posterior is N(post_mean, post_cov) in closed form, which makes
    this the reference target for sampler correctness checks. The
    stochastic gradient uses the same rescaled-minibatch estimator as the
    MLP posterior.
    """

    def __init__(self, x, y, sigma):
        self.x = np.asarray(x, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64).reshape(-1)
        self.sigma = float(sigma)
        self.n = self.x.shape[0]
        d = self.x.shape[1]
        prec = self.x.T @ self.x / sigma ** 2 + np.eye(d)
        self.post_cov = np.linalg.inv(prec)
        self.post_mean = self.post_cov @ (self.x.T @ self.y) / sigma ** 2

    @property
    def dim(self):
        return self.x.shape[1]

    def potential(self, w):
        r = self.x @ w - self.y
        return (float(r @ r) / (2 * self.sigma ** 2)
                + 0.5 * self.n * math.log(2 * math.pi * self.sigma ** 2)
                + 0.5 * float(w @ w)
                + 0.5 * self.dim * math.log(2 * math.pi))

    def grad(self, w):
        r = self.x @ w - self.y
        return self.x.T @ r / self.sigma ** 2 + w

    def score(self, w):
        return -self.grad(w)

    def stochastic_grad(self, w, schedule, vr=None):
        batch = schedule.next_batch(self.n)

        def data_grad(at):
            r = self.x[batch] @ at - self.y[batch]
            return (self.n / len(batch)) * (self.x[batch].T @ r) / self.sigma ** 2

        if vr is None:
            return data_grad(w) + w
        return data_grad(w) - data_grad(vr.anchor) + (w - vr.anchor) + vr.anchor_grad

    def predictive_interval(self, xstar, level):
        """Exact central predictive interval for a new observation at xstar."""
        from scipy import stats
        mu = xstar @ self.post_mean
        var = np.einsum("ij,jk,ik->i", xstar, self.post_cov, xstar) + self.sigma ** 2
        half = stats.norm.ppf(0.5 + level / 2) * np.sqrt(var)
        return mu - half, mu + half
