"""Model core: MLP architecture, parameter packing, and the posterior target.

The probabilistic model is a dense ReLU MLP regression with isotropic
Gaussian observation noise and a standard normal prior on all weights and
biases. The potential is the full negative log joint density, additive
constants included:

    U(w) = SSE / (2 sigma^2) + (N M / 2) log(2 pi sigma^2)
         + ||w||^2 / 2 + (d / 2) log(2 pi)

so exp(-U) integrates consistently across architectures and noise levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels


class DivergenceError(RuntimeError):
    """Raised when an iterative routine produces non-finite numbers."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


@dataclass(frozen=True)
class MlpArchitecture:
    """Layer widths of a dense ReLU MLP, input to output.

    Hidden activations are ReLU, the output layer is linear. Parameters are
    packed per layer as the (fan_in, fan_out) weight matrix in C order
    followed by the bias, layers in forward order.
    """

    layer_sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ValueError("architecture needs at least input and output layers")
        if any(int(s) < 1 for s in self.layer_sizes):
            raise ValueError(f"layer widths must be positive, got {self.layer_sizes}")
        object.__setattr__(self, "layer_sizes", tuple(int(s) for s in self.layer_sizes))

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def param_count(self) -> int:
        sizes = self.layer_sizes
        return sum((sizes[i] + 1) * sizes[i + 1] for i in range(len(sizes) - 1))

    def sizes_array(self) -> np.ndarray:
        return np.asarray(self.layer_sizes, dtype=np.int64)


def unflatten(arch: MlpArchitecture, params: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat parameter vector into per-layer (weights, bias) views."""
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (arch.param_count,):
        raise ValueError(f"expected {arch.param_count} parameters, got shape {params.shape}")
    out = []
    off = 0
    sizes = arch.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w = params[off:off + fan_in * fan_out].reshape(fan_in, fan_out)
        off += fan_in * fan_out
        b = params[off:off + fan_out]
        off += fan_out
        out.append((w, b))
    return out


def flatten(arch: MlpArchitecture, layers: list[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Pack per-layer (weights, bias) pairs into a flat vector."""
    sizes = arch.layer_sizes
    if len(layers) != len(sizes) - 1:
        raise ValueError(f"expected {len(sizes) - 1} layers, got {len(layers)}")
    parts = []
    for (w, b), fan_in, fan_out in zip(layers, sizes[:-1], sizes[1:]):
        w = np.asarray(w, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
            raise ValueError(f"layer shape mismatch: got {w.shape}/{b.shape}, "
                             f"want {(fan_in, fan_out)}/{(fan_out,)}")
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def mlp_forward(arch: MlpArchitecture, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Predictions of the MLP at inputs x, shape (n, out_dim)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != arch.in_dim:
        raise ValueError(f"inputs must be (n, {arch.in_dim}), got {x.shape}")
    params = np.ascontiguousarray(params, dtype=np.float64)
    if params.shape != (arch.param_count,):
        raise ValueError(f"expected {arch.param_count} parameters, got shape {params.shape}")
    return _kernels.forward(arch.sizes_array(), params, x)


@dataclass(frozen=True)
class RegressionDataset:
    """A fixed regression training set with homoscedastic Gaussian noise."""

    x: np.ndarray  # (n, in_dim)
    y: np.ndarray  # (n, out_dim)

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if x.ndim != 2 or y.ndim != 2:
            raise ValueError("x and y must be 2-d arrays")
        if x.shape[0] != y.shape[0]:
            raise ValueError(f"x has {x.shape[0]} rows, y has {y.shape[0]}")
        if x.shape[0] == 0:
            raise ValueError("dataset must not be empty")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]


class MinibatchSchedule:
    """Deterministic stream of uniform without-replacement index batches."""

    def __init__(self, batch_size: int, rng_seed: int):
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        self.batch_size = int(batch_size)
        self.rng_seed = int(rng_seed)
        self._rng = np.random.default_rng(self.rng_seed)

    def next_batch(self, n: int) -> np.ndarray:
        """Indices of the next batch into a dataset of size n."""
        if self.batch_size > n:
            raise ValueError(f"batch_size {self.batch_size} exceeds dataset size {n}")
        return self._rng.choice(n, size=self.batch_size, replace=False)


@dataclass
class VarianceReductionState:
    """Anchor point and its exact full-data gradient for control variates.

    Construct through :func:`anchor_at` so the stored gradient is the true
    gradient of the potential at the anchor; the constructor can verify.
    """

    anchor: np.ndarray
    anchor_grad: np.ndarray
    update_period: int | None = None  # SVRG re-anchor period; None = never

    def verify(self, posterior: "PosteriorSpec", atol: float = 1e-10):
        g = posterior.grad(self.anchor)
        if not np.allclose(g, self.anchor_grad, rtol=0.0, atol=atol * (1.0 + np.abs(g).max())):
            raise ValueError("stale variance-reduction anchor: stored gradient does not "
                             "match grad at the anchor")


def anchor_at(posterior: "PosteriorSpec", anchor: np.ndarray,
              update_period: int | None = None) -> VarianceReductionState:
    anchor = np.array(anchor, dtype=np.float64, copy=True)
    return VarianceReductionState(anchor, posterior.grad(anchor), update_period)


@dataclass
class PosteriorSpec:
    """Posterior target for a ReLU MLP regression with N(0, I) prior.

    Exposes the potential (negative log joint), its exact gradient, and
    unbiased stochastic gradients with optional control-variate correction.
    """

    dataset: RegressionDataset
    arch: MlpArchitecture
    noise_sigma: float

    _sizes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.noise_sigma <= 0.0:
            raise ValueError(f"noise_sigma must be positive, got {self.noise_sigma}")
        if self.dataset.x.shape[1] != self.arch.in_dim:
            raise ValueError(f"dataset inputs have dim {self.dataset.x.shape[1]}, "
                             f"architecture expects {self.arch.in_dim}")
        if self.dataset.y.shape[1] != self.arch.out_dim:
            raise ValueError(f"dataset outputs have dim {self.dataset.y.shape[1]}, "
                             f"architecture expects {self.arch.out_dim}")
        self._sizes = self.arch.sizes_array()

    @property
    def dim(self) -> int:
        return self.arch.param_count

    def _check_params(self, params: np.ndarray) -> np.ndarray:
        params = np.ascontiguousarray(params, dtype=np.float64)
        if params.shape != (self.dim,):
            raise ValueError(f"expected parameter vector of length {self.dim}, "
                             f"got shape {params.shape}")
        return params

    def predict(self, params: np.ndarray, x: np.ndarray) -> np.ndarray:
        return mlp_forward(self.arch, self._check_params(params), x)

    def potential(self, params: np.ndarray) -> float:
        params = self._check_params(params)
        ds = self.dataset
        sse, _ = _kernels.sse_and_grad(self._sizes, params, ds.x, ds.y)
        n_obs = ds.y.size
        s2 = self.noise_sigma ** 2
        return (sse / (2.0 * s2)
                + 0.5 * n_obs * math.log(2.0 * math.pi * s2)
                + 0.5 * float(params @ params)
                + 0.5 * self.dim * math.log(2.0 * math.pi))

    def grad(self, params: np.ndarray) -> np.ndarray:
        """Exact gradient of the potential."""
        params = self._check_params(params)
        ds = self.dataset
        _, g = _kernels.sse_and_grad(self._sizes, params, ds.x, ds.y)
        g /= self.noise_sigma ** 2
        g += params
        return g

    def potential_and_grad(self, params: np.ndarray) -> tuple[float, np.ndarray]:
        params = self._check_params(params)
        ds = self.dataset
        sse, g = _kernels.sse_and_grad(self._sizes, params, ds.x, ds.y)
        s2 = self.noise_sigma ** 2
        g /= s2
        g += params
        u = (sse / (2.0 * s2)
             + 0.5 * ds.y.size * math.log(2.0 * math.pi * s2)
             + 0.5 * float(params @ params)
             + 0.5 * self.dim * math.log(2.0 * math.pi))
        return u, g

    def _batch_data_grad(self, params: np.ndarray, batch: np.ndarray) -> np.ndarray:
        """Data-term gradient estimate (N / |B|) * sum over the batch."""
        ds = self.dataset
        xb = np.ascontiguousarray(ds.x[batch])
        yb = np.ascontiguousarray(ds.y[batch])
        _, g = _kernels.sse_and_grad(self._sizes, params, xb, yb)
        g *= ds.n / (len(batch) * self.noise_sigma ** 2)
        return g

    def stochastic_grad(self, params: np.ndarray, schedule: MinibatchSchedule,
                        vr: VarianceReductionState | None = None) -> np.ndarray:
        """Unbiased potential-gradient estimate from one minibatch.

        Without vr: rescaled batch data gradient plus the exact prior
        gradient. With vr: grad(anchor) + est(params) - est(anchor), both
        estimates on the same batch, which is unbiased with variance
        shrinking as params approaches the anchor.
        """
        params = self._check_params(params)
        batch = schedule.next_batch(self.dataset.n)
        if vr is None:
            g = self._batch_data_grad(params, batch)
            g += params
            return g
        g = self._batch_data_grad(params, batch)
        g -= self._batch_data_grad(vr.anchor, batch)
        g += params - vr.anchor  # prior-term difference is exact
        g += vr.anchor_grad
        return g
