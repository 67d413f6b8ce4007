"""Independent reference implementations used as test oracles.

Everything here is written for clarity over speed and deliberately avoids
the package's own compute paths: explicit Python loops, scipy densities,
and brute-force enumeration.
"""

import numpy as np
from scipy import stats


def oracle_forward(layer_sizes, params, x):
    """Loop-based MLP forward pass, one sample and one unit at a time."""
    layers = []
    off = 0
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        w = np.array([[params[off + i * fan_out + j] for j in range(fan_out)]
                      for i in range(fan_in)])
        off += fan_in * fan_out
        b = np.array([params[off + j] for j in range(fan_out)])
        off += fan_out
        layers.append((w, b))
    assert off == len(params)

    out = np.empty((x.shape[0], layer_sizes[-1]))
    for s in range(x.shape[0]):
        a = x[s]
        for k, (w, b) in enumerate(layers):
            z = np.array([sum(a[i] * w[i, j] for i in range(w.shape[0])) + b[j]
                          for j in range(w.shape[1])])
            a = z if k == len(layers) - 1 else np.where(z > 0, z, 0.0)
        out[s] = a
    return out


def oracle_potential(layer_sizes, params, x, y, sigma):
    """Negative log joint via scipy's normal densities."""
    pred = oracle_forward(layer_sizes, params, x)
    loglik = stats.norm.logpdf(y, loc=pred, scale=sigma).sum()
    logprior = stats.norm.logpdf(params, loc=0.0, scale=1.0).sum()
    return -(loglik + logprior)


def fd_grad(f, w, idx, h=1e-5):
    """Central finite differences of scalar f at coordinates idx."""
    g = np.empty(len(idx))
    for k, i in enumerate(idx):
        wp = w.copy()
        wm = w.copy()
        wp[i] += h
        wm[i] -= h
        g[k] = (f(wp) - f(wm)) / (2.0 * h)
    return g


def oracle_mmd_energy(a, b):
    """MMD under k(x, y) = |x| + |y| - |x - y| via double loops (V-statistic)."""
    def kern(u, v):
        return (np.linalg.norm(u) + np.linalg.norm(v) - np.linalg.norm(u - v))

    kaa = np.mean([[kern(u, v) for v in a] for u in a])
    kbb = np.mean([[kern(u, v) for v in b] for u in b])
    kab = np.mean([[kern(u, v) for v in b] for u in a])
    return np.sqrt(max(kaa + kbb - 2.0 * kab, 0.0))


def oracle_ksd_imq(samples, scores, lengthscale):
    """Stein discrepancy under the inverse multiquadric kernel, double loop.

    Kernel reading: k(x, y) = (1 + ||x - y||^2 / l^2)^(-1/2).
    """
    n, d = samples.shape
    l2 = lengthscale ** 2
    total = 0.0
    for i in range(n):
        for j in range(n):
            u = samples[i] - samples[j]
            r2 = float(u @ u)
            c = 1.0 + r2 / l2
            k = c ** -0.5
            gx = -u / l2 * c ** -1.5          # grad_x k
            gy = u / l2 * c ** -1.5           # grad_y k
            trace = d / l2 * c ** -1.5 - 3.0 * r2 / l2 ** 2 * c ** -2.5
            total += (trace + scores[i] @ gy + scores[j] @ gx
                      + (scores[i] @ scores[j]) * k)
    return np.sqrt(max(total / n ** 2, 0.0))


def oracle_greedy_thin(pool, m):
    """Greedy kernel thinning by brute-force objective recomputation.

    At every round evaluates, for each candidate j, the full V-statistic
    objective of appending j to the current selection, and keeps the
    lowest index within a roundoff envelope of the minimum (candidates
    tied in exact arithmetic differ by summation-order noise in floating
    point). Energy kernel. Indices may repeat.
    """
    t = pool.shape[0]

    def kern(u, v):
        return (np.linalg.norm(u) + np.linalg.norm(v) - np.linalg.norm(u - v))

    kmat = np.array([[kern(pool[i], pool[j]) for j in range(t)] for i in range(t)])
    chosen = []
    for step in range(m):
        vals = []
        for j in range(t):
            sel = chosen + [j]
            # mmd^2 between empirical measures of sel and the full pool,
            # dropping the sel-independent pool/pool term
            vals.append(np.mean([[kmat[p, q] for q in sel] for p in sel])
                        - 2.0 * np.mean([[kmat[p, q] for q in range(t)]
                                         for p in sel]))
        vals = np.array(vals)
        tol = 1e-9 * max(1.0, float(np.abs(vals).max()))
        chosen.append(int(np.flatnonzero(vals <= vals.min() + tol)[0]))
    return np.array(chosen)


def bayes_linear_posterior(x, y, sigma):
    """Exact posterior of weights for y = x @ w + eps, prior N(0, I).

    Returns (mean, covariance).
    """
    d = x.shape[1]
    prec = x.T @ x / sigma ** 2 + np.eye(d)
    cov = np.linalg.inv(prec)
    mean = cov @ (x.T @ y.ravel()) / sigma ** 2
    return mean, cov
