"""Backend selection for the MLP compute kernels.

The compiled Cython extension is used when importable, otherwise the NumPy
implementation. Set BNNBENCH_BACKEND to "cython" or "numpy" to force one
(forcing "cython" raises if the extension is missing).
"""

import os

_choice = os.environ.get("BNNBENCH_BACKEND", "auto").lower()
if _choice not in ("auto", "cython", "numpy"):
    raise ValueError(f"BNNBENCH_BACKEND must be auto, cython or numpy, got {_choice!r}")

if _choice == "numpy":
    from . import npkernels as _impl
else:
    try:
        from . import cykernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "cython":
            raise
        from . import npkernels as _impl

BACKEND = _impl.BACKEND_NAME
forward = _impl.forward
sse_and_grad = _impl.sse_and_grad

__all__ = ["BACKEND", "forward", "sse_and_grad"]
