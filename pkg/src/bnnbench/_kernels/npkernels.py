"""NumPy reference implementation of the MLP compute kernels.

Both backends share one parameter layout: for each layer l = 1..L the
weight matrix W_l of shape (fan_in, fan_out) flattened in C order, followed
by the bias b_l of length fan_out, layers in forward order. Hidden layers
use ReLU, the output layer is linear. The ReLU derivative at exactly zero
is taken to be zero.
"""

import numpy as np

BACKEND_NAME = "numpy"


def forward(sizes, params, x):
    """Batched forward pass.

    Args:
        sizes: int array of layer widths, e.g. [1, 20, 20, 1].
        params: flat float64 parameter vector.
        x: (n, sizes[0]) float64 input batch.

    Returns:
        (n, sizes[-1]) float64 predictions.
    """
    a = x
    off = 0
    last = len(sizes) - 1
    for l in range(1, last + 1):
        fan_in, fan_out = int(sizes[l - 1]), int(sizes[l])
        w = params[off:off + fan_in * fan_out].reshape(fan_in, fan_out)
        off += fan_in * fan_out
        b = params[off:off + fan_out]
        off += fan_out
        a = a @ w + b
        if l < last:
            np.maximum(a, 0.0, out=a)
    return a


def sse_and_grad(sizes, params, x, y):
    """Sum of squared residuals and the gradient of half that sum.

    Returns (sse, g) with sse = sum((f(x; w) - y)**2) and
    g = d/dw [ 0.5 * sse ], laid out like ``params``.
    """
    last = len(sizes) - 1
    # forward pass, keeping pre-activations for the backward sweep
    acts = [x]
    offs = []
    off = 0
    a = x
    for l in range(1, last + 1):
        fan_in, fan_out = int(sizes[l - 1]), int(sizes[l])
        offs.append(off)
        w = params[off:off + fan_in * fan_out].reshape(fan_in, fan_out)
        off += fan_in * fan_out
        b = params[off:off + fan_out]
        off += fan_out
        z = a @ w + b
        a = np.maximum(z, 0.0) if l < last else z
        acts.append(a)

    resid = acts[last] - y
    sse = float(np.sum(resid * resid))

    grad = np.zeros_like(params)
    delta = resid
    for l in range(last, 0, -1):
        fan_in, fan_out = int(sizes[l - 1]), int(sizes[l])
        o = offs[l - 1]
        grad[o:o + fan_in * fan_out] = (acts[l - 1].T @ delta).ravel()
        grad[o + fan_in * fan_out:o + fan_in * fan_out + fan_out] = delta.sum(axis=0)
        if l > 1:
            w = params[o:o + fan_in * fan_out].reshape(fan_in, fan_out)
            delta = delta @ w.T
            # ReLU mask: post-activation > 0 iff pre-activation > 0
            delta *= acts[l - 1] > 0.0
    return sse, grad
