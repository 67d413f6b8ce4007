# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cython implementation of the MLP compute kernels.

Same contract and parameter layout as npkernels. Matrix products go through
BLAS dgemm; bias, ReLU and residual sweeps are plain C loops. Row-major
dgemm is obtained from the Fortran routine by the usual operand swap.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

BACKEND_NAME = "cython"

ctypedef cnp.float64_t f64
ctypedef cnp.int64_t i64


cdef inline void rm_dgemm(bint ta, bint tb, int m, int n, int k,
                          double alpha, const double* a, int lda,
                          const double* b, int ldb,
                          double beta, double* c, int ldc) noexcept nogil:
    # row-major C(m,n) = alpha * op(A)(m,k) @ op(B)(k,n) + beta * C
    cdef char cta = b'T' if ta else b'N'
    cdef char ctb = b'T' if tb else b'N'
    dgemm(&ctb, &cta, &n, &m, &k, &alpha, <double*> b, &ldb,
          <double*> a, &lda, &beta, c, &ldc)


def forward(const i64[::1] sizes, const f64[::1] params, const f64[:, ::1] x):
    """Batched forward pass; see npkernels.forward for the contract."""
    cdef int last = <int> sizes.shape[0] - 1
    cdef int n = <int> x.shape[0]
    cdef int l, fan_in, fan_out, i, j
    cdef Py_ssize_t off = 0
    # activation buffers stay Python objects; access goes through memoryviews
    cdef f64[:, ::1] cv, nv
    cdef const f64* bias

    if n == 0:
        return np.empty((0, sizes[last]), dtype=np.float64)

    cur = np.ascontiguousarray(x, dtype=np.float64)
    for l in range(1, last + 1):
        fan_in = <int> sizes[l - 1]
        fan_out = <int> sizes[l]
        nxt = np.empty((n, fan_out), dtype=np.float64)
        cv = cur
        nv = nxt
        bias = &params[off + <Py_ssize_t> fan_in * fan_out]
        with nogil:
            rm_dgemm(0, 0, n, fan_out, fan_in, 1.0,
                     &cv[0, 0], fan_in, &params[off], fan_out,
                     0.0, &nv[0, 0], fan_out)
            if l < last:
                for i in range(n):
                    for j in range(fan_out):
                        nv[i, j] += bias[j]
                        if nv[i, j] < 0.0:
                            nv[i, j] = 0.0
            else:
                for i in range(n):
                    for j in range(fan_out):
                        nv[i, j] += bias[j]
        off += <Py_ssize_t> fan_in * fan_out + fan_out
        cur = nxt
    return cur


def sse_and_grad(const i64[::1] sizes, const f64[::1] params,
                 const f64[:, ::1] x, const f64[:, ::1] y):
    """Sum of squared residuals and gradient of half that sum.

    Returns (sse, g) with g = d/dw [ 0.5 * sum((f(x; w) - y)**2) ], laid
    out like ``params``.
    """
    cdef int last = <int> sizes.shape[0] - 1
    cdef int n = <int> x.shape[0]
    cdef Py_ssize_t dim = params.shape[0]
    cdef int l, fan_in, fan_out, i, j
    cdef Py_ssize_t off = 0, o
    cdef double sse = 0.0, r, s
    grad = np.zeros(dim, dtype=np.float64)
    cdef f64[::1] gv = grad
    # activation buffers stay Python objects; access goes through memoryviews
    cdef f64[:, ::1] cv, nv, dv, pv, av
    cdef const f64* bias

    if n == 0:
        return 0.0, grad

    # forward pass, keeping every activation for the backward sweep
    acts = [np.ascontiguousarray(x, dtype=np.float64)]
    offs = []
    for l in range(1, last + 1):
        fan_in = <int> sizes[l - 1]
        fan_out = <int> sizes[l]
        offs.append(off)
        buf = np.empty((n, fan_out), dtype=np.float64)
        cv = acts[l - 1]
        nv = buf
        bias = &params[off + <Py_ssize_t> fan_in * fan_out]
        with nogil:
            rm_dgemm(0, 0, n, fan_out, fan_in, 1.0,
                     &cv[0, 0], fan_in, &params[off], fan_out,
                     0.0, &nv[0, 0], fan_out)
            if l < last:
                for i in range(n):
                    for j in range(fan_out):
                        nv[i, j] += bias[j]
                        if nv[i, j] < 0.0:
                            nv[i, j] = 0.0
            else:
                for i in range(n):
                    for j in range(fan_out):
                        nv[i, j] += bias[j]
        off += <Py_ssize_t> fan_in * fan_out + fan_out
        acts.append(buf)

    # residual and sse
    fan_out = <int> sizes[last]
    buf = np.empty((n, fan_out), dtype=np.float64)
    dv = buf
    av = acts[last]
    with nogil:
        for i in range(n):
            for j in range(fan_out):
                r = av[i, j] - y[i, j]
                dv[i, j] = r
                sse += r * r
    delta = buf

    # backward sweep
    for l in range(last, 0, -1):
        fan_in = <int> sizes[l - 1]
        fan_out = <int> sizes[l]
        o = offs[l - 1]
        av = acts[l - 1]
        dv = delta
        with nogil:
            rm_dgemm(1, 0, fan_in, fan_out, n, 1.0,
                     &av[0, 0], fan_in, &dv[0, 0], fan_out,
                     0.0, &gv[o], fan_out)
            for j in range(fan_out):
                s = 0.0
                for i in range(n):
                    s += dv[i, j]
                gv[o + <Py_ssize_t> fan_in * fan_out + j] = s
        if l > 1:
            buf = np.empty((n, fan_in), dtype=np.float64)
            pv = buf
            with nogil:
                rm_dgemm(0, 1, n, fan_in, fan_out, 1.0,
                         &dv[0, 0], fan_out, &params[o], fan_out,
                         0.0, &pv[0, 0], fan_in)
                # ReLU mask: post-activation > 0 iff pre-activation > 0
                for i in range(n):
                    for j in range(fan_in):
                        if av[i, j] <= 0.0:
                            pv[i, j] = 0.0
            delta = buf
    return sse, grad
