"""Predictive bands, coverage statistics, and predictive accuracy.

A band at level 1 - alpha is the pair of empirical alpha/2 and 1 - alpha/2
quantiles, per evaluation point, of the predictive draws. Draws may be
augmented with observation noise (y = f(x; w) + sigma * z); sigma = 0
gives bands of the posterior functions alone.

Coverage is summarized from the indicator matrix I[j, i] = 1 if test
observation i of replicate j falls inside replicate j's band:

    PICP_j  = mean_i I[j, i]        (one value per replicate)
    MCP     = mean_ji I[j, i]
    CCP_i   = mean_j I[j, i]        (conditional coverage per point)
    ccp_mae = mean_i |CCP_i - level|
"""

from __future__ import annotations

import numpy as np


def predictive_band(fn_draws: np.ndarray, level: float, sigma: float = 0.0,
                    noise_draws: int = 100, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper band curves from posterior function draws.

    Args:
        fn_draws: (n_samples, n_points) function values per posterior draw.
        level: target coverage in (0, 1).
        sigma: observation noise scale; 0 disables noise augmentation.
        noise_draws: noise replicas per posterior draw when sigma > 0.
        seed: rng seed for the noise replicas.

    Returns:
        (lo, hi) arrays of shape (n_points,).
    """
    fn_draws = np.atleast_2d(np.asarray(fn_draws, dtype=np.float64))
    if fn_draws.shape[0] < 2:
        raise ValueError("need at least 2 posterior draws for a band")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    values = fn_draws
    if sigma > 0.0:
        if noise_draws < 1:
            raise ValueError("noise_draws must be >= 1 when sigma > 0")
        rng = np.random.default_rng(seed)
        # one noise offset per (posterior draw, replica), shared across the
        # grid: marginally exact per point and cheap
        z = rng.standard_normal((fn_draws.shape[0], noise_draws))
        values = (fn_draws[:, None, :] + sigma * z[:, :, None]).reshape(
            -1, fn_draws.shape[1])
    alpha = 1.0 - level
    lo = np.quantile(values, alpha / 2.0, axis=0)
    hi = np.quantile(values, 1.0 - alpha / 2.0, axis=0)
    return lo, hi


def band_indicators(y_true: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Boolean inclusion of each observation in the band."""
    y = np.asarray(y_true, dtype=np.float64).reshape(-1)
    if y.shape != lo.shape or y.shape != hi.shape:
        raise ValueError("y_true, lo, hi must have matching shapes")
    return (y >= lo) & (y <= hi)


def picp(indicators: np.ndarray) -> float:
    """Prediction interval coverage probability of one replicate."""
    ind = np.asarray(indicators)
    if ind.size == 0:
        raise ValueError("empty indicator array")
    return float(ind.mean())


def coverage_summary(indicator_matrix: np.ndarray, level: float) -> dict:
    """MCP, per-replicate PICPs, CCP curve and its MAE from the target level.

    indicator_matrix has shape (n_replicates, n_points).
    """
    ind = np.atleast_2d(np.asarray(indicator_matrix, dtype=bool))
    if ind.size == 0:
        raise ValueError("empty indicator matrix")
    picps = ind.mean(axis=1)
    ccp = ind.mean(axis=0)
    return {
        "mcp": float(ind.mean()),
        "picp": picps,
        "ccp": ccp,
        "ccp_mae": float(np.abs(ccp - level).mean()),
    }


def q2(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Predictivity coefficient: 1 - SSE / total sum of squares."""
    y = np.asarray(y_true, dtype=np.float64).reshape(-1)
    f = np.asarray(y_pred, dtype=np.float64).reshape(-1)
    if y.shape != f.shape:
        raise ValueError("y_true and y_pred must have the same length")
    tss = float(((y - y.mean()) ** 2).sum())
    if tss == 0.0:
        raise ValueError("constant y_true: predictivity undefined")
    return 1.0 - float(((y - f) ** 2).sum()) / tss
