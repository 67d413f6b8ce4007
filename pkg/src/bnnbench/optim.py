"""Adam-based MAP training with an exponentially decaying step size.

Works on any target exposing dim, potential(w), grad(w) and
stochastic_grad(w, schedule); the posterior types in this package and the
test doubles all satisfy that protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DivergenceError, MinibatchSchedule


@dataclass(frozen=True)
class OptConfig:
    """Adam settings.

    The step size decays geometrically from init_step to final_step over
    the run. batch_size None means full-batch gradients.
    """

    iterations: int = 5000
    init_step: float = 1e-2
    final_step: float = 1e-4
    batch_size: int | None = None
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    eval_every: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.init_step <= 0 or self.final_step <= 0:
            raise ValueError("step sizes must be positive")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("betas must lie in [0, 1)")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1 or None")

    def step_at(self, t: int) -> float:
        """Step size at 0-based iteration t."""
        if self.iterations <= 1:
            return self.init_step
        gamma = (self.final_step / self.init_step) ** (1.0 / (self.iterations - 1))
        return self.init_step * gamma ** t


@dataclass
class MapResult:
    params: np.ndarray
    potential: float
    iterations: int


def adam_minimize(target, config: OptConfig, init: np.ndarray) -> MapResult:
    """Minimize the target potential with Adam, returning the best iterate.

    The best-so-far iterate is tracked against the full potential every
    eval_every iterations and at the end, so the result is never worse than
    the initial point. Non-finite parameters or gradients raise
    DivergenceError naming the iteration.
    """
    w = np.array(init, dtype=np.float64, copy=True)
    if w.shape != (target.dim,):
        raise ValueError(f"init must have shape ({target.dim},), got {w.shape}")

    best_w = w.copy()
    best_u = float(target.potential(w))
    if not math.isfinite(best_u):
        raise DivergenceError("initial potential is non-finite", iteration=0)
    if config.iterations == 0:
        return MapResult(best_w, best_u, 0)

    schedule = None
    if config.batch_size is not None:
        schedule = MinibatchSchedule(config.batch_size, rng_seed=config.seed)

    m = np.zeros_like(w)
    v = np.zeros_like(w)
    # overflow is detected via the finiteness checks, not numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(config.iterations):
            if schedule is None:
                g = target.grad(w)
            else:
                g = target.stochastic_grad(w, schedule)
            if not np.isfinite(g).all():
                raise DivergenceError(f"non-finite gradient at iteration {t + 1}",
                                      iteration=t + 1)
            m = config.beta1 * m + (1.0 - config.beta1) * g
            v = config.beta2 * v + (1.0 - config.beta2) * g * g
            mhat = m / (1.0 - config.beta1 ** (t + 1))
            vhat = v / (1.0 - config.beta2 ** (t + 1))
            w = w - config.step_at(t) * mhat / (np.sqrt(vhat) + config.eps)
            if not np.isfinite(w).all():
                raise DivergenceError(f"non-finite parameters at iteration {t + 1}",
                                      iteration=t + 1)
            if (t + 1) % config.eval_every == 0 or t + 1 == config.iterations:
                u = float(target.potential(w))
                if not math.isfinite(u):
                    raise DivergenceError(f"non-finite potential at iteration {t + 1}",
                                          iteration=t + 1)
                if u < best_u:
                    best_u = u
                    best_w = w.copy()
    return MapResult(best_w, best_u, config.iterations)


def train_map(posterior, config: OptConfig) -> MapResult:
    """Draw an init from the N(0, I) prior and minimize the potential."""
    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
    init = rng.standard_normal(posterior.dim)
    return adam_minimize(posterior, config, init)
