# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""BLAS-backed LSTM sequence kernels, the compiled twin of kernels.reference.

Same signatures and numerics as the numpy fallback: packed gate layout
[forget, input, candidate, output], zero initial states, float64
throughout. Matrix products go through dgemm with row-major arrays
expressed as transposed Fortran views.
"""

from libc.math cimport exp, tanh

import numpy as np

from scipy.linalg.cython_blas cimport dgemm


cdef inline double _sig(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef inline void _gemm_ab(int m, int n, int k, double* pa, int sa,
                          double* pb, int sb, double beta, double* pc, int sc) noexcept nogil:
    # row-major C(m,n) = A(m,k) @ B(k,n) + beta*C; sa/sb/sc are row strides
    cdef char tn = c'N'
    cdef double alpha = 1.0
    dgemm(&tn, &tn, &n, &m, &k, &alpha, pb, &sb, pa, &sa, &beta, pc, &sc)


cdef inline void _gemm_atb(int m, int n, int k, double* pa, int sa,
                           double* pb, int sb, double* pc, int sc) noexcept nogil:
    # row-major C(m,n) += A^T @ B with A stored (k,m), B stored (k,n)
    cdef char tn = c'N'
    cdef char tt = c'T'
    cdef double alpha = 1.0
    cdef double beta = 1.0
    dgemm(&tn, &tt, &n, &m, &k, &alpha, pb, &sb, pa, &sa, &beta, pc, &sc)


cdef inline void _gemm_abt(int m, int n, int k, double* pa, int sa,
                           double* pb, int sb, double* pc, int sc) noexcept nogil:
    # row-major C(m,n) = A(m,k) @ B^T with B stored (n,k)
    cdef char tn = c'N'
    cdef char tt = c'T'
    cdef double alpha = 1.0
    cdef double beta = 0.0
    dgemm(&tt, &tn, &n, &m, &k, &alpha, pb, &sb, pa, &sa, &beta, pc, &sc)


cdef void _forward(double[:, :, ::1] x, double[:, ::1] u, double[:, ::1] w,
                   double[::1] bias, double[:, :, ::1] h, double[:, :, ::1] c,
                   double[:, :, ::1] gates, double[:, :, ::1] tanh_c):
    cdef Py_ssize_t bsz = x.shape[0]
    cdef Py_ssize_t steps = x.shape[1]
    cdef Py_ssize_t din = x.shape[2]
    cdef Py_ssize_t units = w.shape[0]
    cdef Py_ssize_t t, i, j
    cdef double f, ig, g, o, cp, ct, tc
    # the input projection has no recurrence, so run it for every step
    # in one contiguous (bsz*steps, din) GEMM straight into the gates
    # cache; bias is added below
    _gemm_ab(<int>(bsz * steps), <int>(4 * units), <int>din,
             &x[0, 0, 0], <int>din,
             &u[0, 0], <int>(4 * units),
             0.0, &gates[0, 0, 0], <int>(4 * units))
    for t in range(steps):
        if t > 0:
            _gemm_ab(<int>bsz, <int>(4 * units), <int>units,
                     &h[0, t - 1, 0], <int>(steps * units),
                     &w[0, 0], <int>(4 * units),
                     1.0, &gates[0, t, 0], <int>(steps * 4 * units))
        for i in range(bsz):
            for j in range(units):
                f = _sig(gates[i, t, j] + bias[j])
                ig = _sig(gates[i, t, units + j] + bias[units + j])
                g = tanh(gates[i, t, 2 * units + j] + bias[2 * units + j])
                o = _sig(gates[i, t, 3 * units + j] + bias[3 * units + j])
                cp = c[i, t - 1, j] if t > 0 else 0.0
                ct = f * cp + ig * g
                tc = tanh(ct)
                gates[i, t, j] = f
                gates[i, t, units + j] = ig
                gates[i, t, 2 * units + j] = g
                gates[i, t, 3 * units + j] = o
                c[i, t, j] = ct
                tanh_c[i, t, j] = tc
                h[i, t, j] = o * tc


cdef void _backward(double[:, :, ::1] x, double[:, ::1] u, double[:, ::1] w,
                    double[:, :, ::1] h, double[:, :, ::1] c,
                    double[:, :, ::1] gates, double[:, :, ::1] tanh_c,
                    double[:, :, ::1] dh_seq, double[:, :, ::1] dx,
                    double[:, ::1] du, double[:, ::1] dw, double[::1] db,
                    double[:, ::1] dz, double[:, ::1] dh_next, double[:, ::1] dc_next):
    cdef Py_ssize_t bsz = x.shape[0]
    cdef Py_ssize_t steps = x.shape[1]
    cdef Py_ssize_t din = x.shape[2]
    cdef Py_ssize_t units = w.shape[0]
    cdef Py_ssize_t t, i, j
    cdef double f, ig, g, o, tc, dh, dc, cp
    for t in range(steps - 1, -1, -1):
        for i in range(bsz):
            for j in range(units):
                dh = dh_seq[i, t, j] + dh_next[i, j]
                tc = tanh_c[i, t, j]
                f = gates[i, t, j]
                ig = gates[i, t, units + j]
                g = gates[i, t, 2 * units + j]
                o = gates[i, t, 3 * units + j]
                dc = dc_next[i, j] + dh * o * (1.0 - tc * tc)
                cp = c[i, t - 1, j] if t > 0 else 0.0
                dz[i, j] = dc * cp * f * (1.0 - f)
                dz[i, units + j] = dc * g * ig * (1.0 - ig)
                dz[i, 2 * units + j] = dc * ig * (1.0 - g * g)
                dz[i, 3 * units + j] = dh * tc * o * (1.0 - o)
                dc_next[i, j] = dc * f
                db[j] += dz[i, j]
                db[units + j] += dz[i, units + j]
                db[2 * units + j] += dz[i, 2 * units + j]
                db[3 * units + j] += dz[i, 3 * units + j]
        _gemm_atb(<int>din, <int>(4 * units), <int>bsz,
                  &x[0, t, 0], <int>(steps * din),
                  &dz[0, 0], <int>(4 * units),
                  &du[0, 0], <int>(4 * units))
        if t > 0:
            _gemm_atb(<int>units, <int>(4 * units), <int>bsz,
                      &h[0, t - 1, 0], <int>(steps * units),
                      &dz[0, 0], <int>(4 * units),
                      &dw[0, 0], <int>(4 * units))
        _gemm_abt(<int>bsz, <int>din, <int>(4 * units),
                  &dz[0, 0], <int>(4 * units),
                  &u[0, 0], <int>(4 * units),
                  &dx[0, t, 0], <int>(steps * din))
        _gemm_abt(<int>bsz, <int>units, <int>(4 * units),
                  &dz[0, 0], <int>(4 * units),
                  &w[0, 0], <int>(4 * units),
                  &dh_next[0, 0], <int>units)


def lstm_forward(x, u, w, b):
    """Run one LSTM direction over a batch; see kernels.reference.lstm_forward."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"x must be (batch, steps, input_dim), got shape {x.shape}")
    units = w.shape[0]
    if u.shape != (x.shape[2], 4 * units) or w.shape != (units, 4 * units) or b.shape != (4 * units,):
        raise ValueError("parameter shapes are inconsistent with the input")
    batch, steps = x.shape[0], x.shape[1]
    h = np.empty((batch, steps, units))
    c = np.empty((batch, steps, units))
    gates = np.empty((batch, steps, 4 * units))
    tanh_c = np.empty((batch, steps, units))
    _forward(x, u, w, b, h, c, gates, tanh_c)
    return h, c, gates, tanh_c


def lstm_backward(x, u, w, h, c, gates, tanh_c, dh_seq):
    """BPTT for one LSTM direction; see kernels.reference.lstm_backward."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    gates = np.ascontiguousarray(gates, dtype=np.float64)
    tanh_c = np.ascontiguousarray(tanh_c, dtype=np.float64)
    dh_seq = np.ascontiguousarray(dh_seq, dtype=np.float64)
    units = w.shape[0]
    batch, steps = x.shape[0], x.shape[1]
    if dh_seq.shape != (batch, steps, units):
        raise ValueError(f"dh_seq shape {dh_seq.shape} does not match ({batch}, {steps}, {units})")
    dx = np.zeros_like(x)
    du = np.zeros_like(u)
    dw = np.zeros_like(w)
    db = np.zeros(4 * units)
    dz = np.empty((batch, 4 * units))
    dh_next = np.zeros((batch, units))
    dc_next = np.zeros((batch, units))
    _backward(x, u, w, h, c, gates, tanh_c, dh_seq, dx, du, dw, db, dz, dh_next, dc_next)
    return dx, du, dw, db
