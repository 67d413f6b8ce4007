"""SWAG: Gaussian posterior approximation from an SGD trajectory.

Constant-step SGD iterates feed a running mean, a running second moment
and the most recent rank deviation columns. Samples combine the diagonal
and low-rank pieces with 1/sqrt(2) weights so that, for roughly iid
iterates, the sample covariance matches the iterate covariance.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..model import MinibatchSchedule
from .base import ChainDivergenceError, SampleSet


@dataclass(frozen=True)
class SwagConfig:
    step_size: float = 1e-5
    total_iterations: int = 2000
    collect_every: int = 1
    rank: int = 20
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.step_size < 0.0:
            raise ValueError("step_size must be >= 0")
        if self.total_iterations < 1:
            raise ValueError("total_iterations must be >= 1")
        if self.collect_every < 1:
            raise ValueError("collect_every must be >= 1")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class SwagModel:
    """First two moments plus low-rank deviations of the SGD trajectory."""

    mean: np.ndarray
    var: np.ndarray
    deviations: np.ndarray  # (dim, rank_used) columns w_i - running mean
    n_collected: int

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def rank(self) -> int:
        return self.deviations.shape[1]


class _MomentTracker:
    """Streaming mean / second moment / deviation window."""

    def __init__(self, dim: int, rank: int):
        self.mean = np.zeros(dim)
        self.sq_mean = np.zeros(dim)
        self.count = 0
        self.columns = deque(maxlen=rank)

    def push(self, w: np.ndarray):
        self.count += 1
        self.mean += (w - self.mean) / self.count
        self.sq_mean += (w * w - self.sq_mean) / self.count
        self.columns.append(w - self.mean)

    def finish(self, requested_rank: int) -> SwagModel:
        if self.count == 0:
            raise ValueError("no iterates were collected")
        if self.count < requested_rank:
            warnings.warn(f"only {self.count} iterates collected; deviation "
                          f"rank reduced from {requested_rank} to {self.count}")
        var = np.maximum(self.sq_mean - self.mean * self.mean, 0.0)
        dev = np.column_stack(self.columns) if self.columns else \
            np.zeros((self.mean.shape[0], 0))
        return SwagModel(self.mean.copy(), var, dev, self.count)


def collect_moments(iterates: np.ndarray, rank: int) -> SwagModel:
    """Build a SwagModel from an explicit iterate sequence (row per step)."""
    iterates = np.atleast_2d(np.asarray(iterates, dtype=np.float64))
    tracker = _MomentTracker(iterates.shape[1], rank)
    for w in iterates:
        tracker.push(w)
    return tracker.finish(rank)


def swag_fit(target, config: SwagConfig, init: np.ndarray) -> SwagModel:
    """Run constant-step SGD from init and accumulate SWAG moments.

    Every collect_every-th iterate is absorbed; non-finite or exploded
    parameters raise ChainDivergenceError with the iteration.
    """
    dim = target.dim
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (dim,):
        raise ValueError(f"init has shape {init.shape}, target dim is {dim}")

    sched_seed = int(np.random.SeedSequence(config.seed).generate_state(1)[0])
    schedule = MinibatchSchedule(config.batch_size, sched_seed)
    tracker = _MomentTracker(dim, config.rank)

    w = init.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, config.total_iterations + 1):
            g = target.stochastic_grad(w, schedule)
            w = w - config.step_size * g
            # unstable SGD can oscillate at astronomical but finite magnitude
            # for the whole run, so bound the norm as well as checking finiteness
            if not np.isfinite(w).all() or w @ w > 1e12:
                raise ChainDivergenceError(
                    f"SGD trajectory went non-finite or exploded at iteration {k}",
                    iteration=k)
            if k % config.collect_every == 0:
                tracker.push(w)
    return tracker.finish(config.rank)


def swag_sample(model: SwagModel, n_samples: int, seed: int = 0,
                algorithm: str = "swag",
                hyperparams: dict | None = None) -> SampleSet:
    """Draw n_samples from the SWAG Gaussian.

    w = mean + std * z1 / sqrt(2) + D z2 / sqrt(2 (rank - 1)); the
    low-rank term is skipped when fewer than two columns exist.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    std = np.sqrt(model.var)
    rank = model.rank

    draws = np.empty((n_samples, model.dim))
    for i in range(n_samples):
        w = model.mean + std * rng.standard_normal(model.dim) / np.sqrt(2.0)
        if rank >= 2:
            z2 = rng.standard_normal(rank)
            w = w + model.deviations @ z2 / np.sqrt(2.0 * (rank - 1))
        draws[i] = w

    return SampleSet(
        samples=draws,
        algorithm=algorithm,
        hyperparams=hyperparams or {"rank": rank},
        seed=seed,
        info={"n_collected": model.n_collected, "rank_used": rank},
    )
