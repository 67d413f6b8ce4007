"""Shared sampler types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import DivergenceError


class ChainDivergenceError(DivergenceError):
    """A sampling chain produced non-finite state."""


@dataclass
class SampleSet:
    """Ordered posterior draws plus provenance.

    samples has one draw per row; every row shares the flat parameter
    layout of one architecture.
    """

    samples: np.ndarray
    algorithm: str
    hyperparams: dict
    seed: int
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.samples, dtype=np.float64))
        if s.ndim != 2 or s.shape[0] == 0:
            raise ValueError("samples must be a non-empty 2-d array")
        if not np.isfinite(s).all():
            raise ValueError("samples contain non-finite values")
        self.samples = s

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]
