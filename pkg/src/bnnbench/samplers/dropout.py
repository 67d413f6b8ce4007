"""MC dropout realized as multiplicative masks on the weight vector.

Dropping a hidden unit with probability p zeroes the rows of the next
layer's weight matrix that carry its output, and scales surviving rows
by 1/(1-p) so the masked pre-activations are unbiased. That whole
operation is a per-draw scale vector s on the flat parameters: training
follows gradients of U(s * w) through the mask, and predictive draws
are the masked weight vectors s_i * w* for a trained w*.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import MlpArchitecture
from ..optim import OptConfig, adam_minimize
from .base import SampleSet


@dataclass(frozen=True)
class DropoutConfig:
    rate: float = 0.1
    n_samples: int = 500
    opt: OptConfig = field(default_factory=OptConfig)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ValueError(f"dropout rate must lie in [0, 1), got {self.rate}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


def mask_scales(arch: MlpArchitecture, rate: float,
                rng: np.random.Generator) -> np.ndarray:
    """One dropout mask as a scale vector over the flat parameters.

    Every weight block except the first has hidden fan-in; its rows get
    keep/(1-rate) factors, one Bernoulli(1-rate) draw per input unit.
    Biases and the input-layer block stay at 1.
    """
    sizes = arch.layer_sizes
    scales = np.ones(arch.param_count)
    offset = 0
    for layer, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        if layer >= 1:
            keep = (rng.random(fan_in) >= rate) / (1.0 - rate)
            scales[offset:offset + fan_in * fan_out] = np.repeat(keep, fan_out)
        offset += (fan_in + 1) * fan_out
    return scales


class _MaskedObjective:
    """Posterior proxy whose gradients see a fresh mask per call.

    The potential stays unmasked so best-iterate tracking inside the
    optimizer is deterministic; only gradient calls consume mask draws.
    """

    def __init__(self, posterior, rate: float, mask_seed):
        self._post = posterior
        self._rate = rate
        self._rng = np.random.default_rng(mask_seed)

    @property
    def dim(self) -> int:
        return self._post.dim

    def potential(self, w):
        return self._post.potential(w)

    def _masked_grad(self, w, data_grad_at):
        s = mask_scales(self._post.arch, self._rate, self._rng)
        masked = s * w
        data = data_grad_at(masked) - masked  # strip the N(0, I) prior term
        return s * data + w

    def grad(self, w):
        return self._masked_grad(w, self._post.grad)

    def stochastic_grad(self, w, schedule):
        return self._masked_grad(
            w, lambda masked: self._post.stochastic_grad(masked, schedule))


def mc_dropout_sample(posterior, config: DropoutConfig) -> SampleSet:
    """Train with dropout, then return masked copies of the trained weights."""
    train_ss, sample_ss, init_ss = np.random.SeedSequence(config.seed).spawn(3)
    objective = _MaskedObjective(posterior, config.rate, train_ss)

    init = np.random.default_rng(init_ss).standard_normal(posterior.dim)
    result = adam_minimize(objective, config.opt, init)

    rng = np.random.default_rng(sample_ss)
    draws = np.empty((config.n_samples, posterior.dim))
    for i in range(config.n_samples):
        draws[i] = mask_scales(posterior.arch, config.rate, rng) * result.params

    return SampleSet(
        samples=draws,
        algorithm="mc-dropout",
        hyperparams={"rate": config.rate, "n_samples": config.n_samples,
                     "iterations": config.opt.iterations},
        seed=config.seed,
        info={"map_potential": result.potential},
    )
