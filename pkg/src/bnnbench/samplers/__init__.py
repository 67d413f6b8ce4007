"""Posterior samplers and approximations."""

from .base import ChainDivergenceError, SampleSet
from .dropout import DropoutConfig, mask_scales, mc_dropout_sample
from .ensemble import EnsembleError, deep_ensemble
from .hmc import HmcConfig, hmc_run, leapfrog, tune_step_size
from .sgmcmc import (SgmcmcConfig, cyclical_step_size, psgld_step, run_sgmcmc,
                     sghmc_step, sgld_step)
from .swag import (SwagConfig, SwagModel, collect_moments, swag_fit,
                   swag_sample)

__all__ = [
    "ChainDivergenceError", "SampleSet",
    "SgmcmcConfig", "run_sgmcmc", "sgld_step", "sghmc_step", "psgld_step",
    "cyclical_step_size",
    "HmcConfig", "hmc_run", "leapfrog", "tune_step_size",
    "SwagConfig", "SwagModel", "swag_fit", "swag_sample", "collect_moments",
    "EnsembleError", "deep_ensemble",
    "DropoutConfig", "mc_dropout_sample", "mask_scales",
]
