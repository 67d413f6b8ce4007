"""Stochastic-gradient MCMC: SGLD and SGHMC families with variants.

Update rules, with U the potential, ghat an unbiased gradient estimate,
eps the step size and xi fresh standard normal noise:

  SGLD          w <- w - eps * ghat + sqrt(2 eps) xi
  SGHMC         w <- w + v
                v <- (1 - a) v - eps * ghat(w_old) + sqrt(2 a eps) xi
  pSGLD         w <- w - eps * D ghat + sqrt(2 eps D) xi
                D = 1 / (damping + sqrt(L)), L an EMA of squared gradients
                that lags one move behind.

Variants layer on top: control variates and SVRG swap the gradient
estimator, the cyclical variant drives eps with a cosine schedule, and
the preconditioned variant is pSGLD (SGLD family only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..metrics.thinning import thin_samples
from ..model import MinibatchSchedule, anchor_at
from .base import ChainDivergenceError, SampleSet

FAMILIES = ("sgld", "sghmc")
VARIANTS = ("plain", "cv", "svrg", "cyclical", "preconditioned")


@dataclass
class SgmcmcConfig:
    """Knobs for one SGMCMC run.

    burn_in defaults to half the iterations.  thin_target, when set,
    reduces the retained draws to that many points by greedy kernel
    thinning; raw retention is capped at thin_pool draws by striding.
    """

    family: str = "sgld"
    variant: str = "plain"
    step_size: float = 1e-6
    total_iterations: int = 10000
    burn_in: int | None = None
    batch_size: int = 32
    seed: int = 0
    svrg_period: int = 100
    cycles: int | None = None
    friction: float = 0.1
    resample_period: int = 10
    precond_decay: float = 0.99
    precond_damping: float = 1e-5
    thin_target: int | None = None
    thin_pool: int = 1024

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.variant == "preconditioned" and self.family != "sgld":
            raise ValueError("preconditioning is defined for the sgld family only")
        if self.variant == "cyclical" and (self.cycles is None or self.cycles < 1):
            raise ValueError("cyclical variant requires cycles >= 1")
        if self.step_size <= 0.0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.total_iterations < 1:
            raise ValueError("total_iterations must be >= 1")
        if self.burn_in is None:
            self.burn_in = self.total_iterations // 2
        if not 0 <= self.burn_in < self.total_iterations:
            raise ValueError(f"burn_in must lie in [0, total_iterations), got "
                             f"{self.burn_in} of {self.total_iterations}; nothing "
                             f"would be retained")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.svrg_period < 1:
            raise ValueError("svrg_period must be >= 1")
        if not 0.0 < self.friction <= 1.0:
            raise ValueError(f"friction must lie in (0, 1], got {self.friction}")
        if self.resample_period < 1:
            raise ValueError("resample_period must be >= 1")
        if not 0.0 <= self.precond_decay < 1.0:
            raise ValueError("precond_decay must lie in [0, 1)")
        if self.precond_damping <= 0.0:
            raise ValueError("precond_damping must be positive")
        if self.thin_target is not None and self.thin_target < 1:
            raise ValueError("thin_target must be >= 1 when set")
        if self.thin_pool < 1:
            raise ValueError("thin_pool must be >= 1")

    def label(self) -> str:
        if self.variant == "preconditioned":
            return "psgld"
        if self.variant == "plain":
            return self.family
        return f"{self.family}-{self.variant}"


def sgld_step(params: np.ndarray, grad: np.ndarray, step_size: float,
              noise: np.ndarray) -> np.ndarray:
    """One Langevin update; noise is standard normal."""
    return params - step_size * grad + math.sqrt(2.0 * step_size) * noise


def sghmc_step(params: np.ndarray, momentum: np.ndarray, grad: np.ndarray,
               step_size: float, friction: float, noise: np.ndarray):
    """One SGHMC update; grad is evaluated at the incoming position.

    The position advances by the incoming momentum, then the momentum is
    refreshed with friction, gradient and noise.
    """
    new_params = params + momentum
    new_momentum = ((1.0 - friction) * momentum - step_size * grad
                    + math.sqrt(2.0 * friction * step_size) * noise)
    return new_params, new_momentum


def psgld_step(params: np.ndarray, grad: np.ndarray, accumulator: np.ndarray,
               step_size: float, decay: float, damping: float,
               noise: np.ndarray):
    """One preconditioned Langevin update.

    The incoming accumulator reflects gradients of earlier iterations
    only (zeros on the first call); the current gradient enters the
    accumulator after the move, so the preconditioner lags one step.
    """
    precond = 1.0 / (damping + np.sqrt(accumulator))
    new_params = (params - step_size * precond * grad
                  + np.sqrt(2.0 * step_size * precond) * noise)
    new_accumulator = decay * accumulator + (1.0 - decay) * grad * grad
    return new_params, new_accumulator


def cyclical_step_size(k: int, base_step: float, total_iterations: int,
                       n_cycles: int) -> float:
    """Cosine step schedule restarting n_cycles times; k is 1-based.

    Each cycle starts at base_step and decays to ~0 before the restart.
    """
    if k < 1 or k > total_iterations:
        raise ValueError(f"iteration {k} outside 1..{total_iterations}")
    cycle_len = math.ceil(total_iterations / n_cycles)
    phase = (k - 1) % cycle_len
    return 0.5 * base_step * (math.cos(math.pi * phase / cycle_len) + 1.0)


def run_sgmcmc(target, config: SgmcmcConfig, init: np.ndarray) -> SampleSet:
    """Run one chain and return retained (optionally thinned) draws.

    target exposes dim, grad and stochastic_grad(params, schedule, vr).
    The chain starts at init; cv and svrg anchor there too.  Raises
    ChainDivergenceError as soon as the state goes non-finite or its
    norm leaves any plausible posterior scale.
    """
    dim = target.dim
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (dim,):
        raise ValueError(f"init has shape {init.shape}, target dim is {dim}")

    noise_ss, sched_ss = np.random.SeedSequence(config.seed).spawn(2)
    noise_rng = np.random.default_rng(noise_ss)
    schedule = MinibatchSchedule(config.batch_size,
                                 int(sched_ss.generate_state(1)[0]))

    vr = None
    if config.variant in ("cv", "svrg"):
        period = config.svrg_period if config.variant == "svrg" else None
        vr = anchor_at(target, init, period)

    total = config.total_iterations
    burn = config.burn_in
    n_post = total - burn
    stride = max(1, math.ceil(n_post / config.thin_pool))

    w = init.copy()
    momentum = np.zeros(dim)
    accumulator = np.zeros(dim)
    if config.variant == "preconditioned":
        # warm-start the squared-gradient accumulator: starting it at zero
        # makes the first preconditioner 1/damping (~1e5), and that single
        # kick strands the chain hundreds of posterior widths out with a
        # recovery time in the millions of steps
        g0 = target.stochastic_grad(w, schedule, vr)
        accumulator = g0 * g0
    pool = []

    # overflow surfaces through the finiteness check, not numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, total + 1):
            if config.variant == "cyclical":
                step = cyclical_step_size(k, config.step_size, total,
                                          config.cycles)
            else:
                step = config.step_size

            if config.family == "sghmc":
                if (k - 1) % config.resample_period == 0:
                    momentum = math.sqrt(step) * noise_rng.standard_normal(dim)
                grad = target.stochastic_grad(w, schedule, vr)
                w, momentum = sghmc_step(w, momentum, grad, step,
                                         config.friction,
                                         noise_rng.standard_normal(dim))
            elif config.variant == "preconditioned":
                grad = target.stochastic_grad(w, schedule, vr)
                w, accumulator = psgld_step(w, grad, accumulator, step,
                                            config.precond_decay,
                                            config.precond_damping,
                                            noise_rng.standard_normal(dim))
            else:
                grad = target.stochastic_grad(w, schedule, vr)
                w = sgld_step(w, grad, step, noise_rng.standard_normal(dim))

            # an unstable chain can oscillate at astronomical magnitude for
            # thousands of steps before any coordinate overflows to inf, so
            # treat norms far beyond any plausible posterior as divergence too
            if not np.isfinite(w).all() or w @ w > 1e12:
                raise ChainDivergenceError(
                    f"chain state went non-finite or exploded at iteration {k}",
                    iteration=k)

            if config.variant == "svrg" and k % config.svrg_period == 0:
                vr = anchor_at(target, w, config.svrg_period)

            if k > burn and (k - burn - 1) % stride == 0:
                pool.append(w.copy())

    samples = np.asarray(pool)
    if config.thin_target is not None:
        samples = thin_samples(samples, config.thin_target)

    return SampleSet(
        samples=samples,
        algorithm=config.label(),
        hyperparams={"step_size": config.step_size,
                     "batch_size": config.batch_size,
                     "total_iterations": total,
                     "burn_in": burn},
        seed=config.seed,
        info={"n_pooled": len(pool), "collect_stride": stride,
              "thinned": config.thin_target is not None},
    )
