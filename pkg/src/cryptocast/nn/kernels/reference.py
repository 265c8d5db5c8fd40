"""Pure-numpy LSTM sequence kernels.

These are the fallback implementations used when the compiled extension
is unavailable. Both kernels operate on a whole batch of sequences and
share a packed parameter layout:

    u: (input_dim, 4*units)   input-to-gate weights
    w: (units, 4*units)       recurrent weights
    b: (4*units,)             gate biases

Gate columns are ordered [forget, input, candidate, output]. Initial
hidden and cell states are zero.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit


def lstm_forward(x: np.ndarray, u: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Run one LSTM direction over a batch.

    x: (batch, steps, input_dim). Returns (h, c, gates, tanh_c) where
    h, c, tanh_c are (batch, steps, units) and gates is
    (batch, steps, 4*units) holding post-activation gate values.
    """
    batch, steps, _ = x.shape
    units = w.shape[0]
    h = np.empty((batch, steps, units))
    c = np.empty((batch, steps, units))
    gates = np.empty((batch, steps, 4 * units))
    tanh_c = np.empty((batch, steps, units))

    h_prev = np.zeros((batch, units))
    c_prev = np.zeros((batch, units))
    for t in range(steps):
        z = x[:, t] @ u + h_prev @ w + b
        f = expit(z[:, :units])
        i = expit(z[:, units : 2 * units])
        g = np.tanh(z[:, 2 * units : 3 * units])
        o = expit(z[:, 3 * units :])
        c_t = f * c_prev + i * g
        tc_t = np.tanh(c_t)
        h_t = o * tc_t

        gates[:, t, :units] = f
        gates[:, t, units : 2 * units] = i
        gates[:, t, 2 * units : 3 * units] = g
        gates[:, t, 3 * units :] = o
        h[:, t] = h_t
        c[:, t] = c_t
        tanh_c[:, t] = tc_t
        h_prev = h_t
        c_prev = c_t
    return h, c, gates, tanh_c


def lstm_backward(
    x: np.ndarray,
    u: np.ndarray,
    w: np.ndarray,
    h: np.ndarray,
    c: np.ndarray,
    gates: np.ndarray,
    tanh_c: np.ndarray,
    dh_seq: np.ndarray,
):
    """Backpropagate through time for one LSTM direction.

    dh_seq: (batch, steps, units) upstream gradient w.r.t. each step's
    hidden output. Returns (dx, du, dw, db) matching the forward inputs.
    """
    batch, steps, _ = x.shape
    units = w.shape[0]
    dx = np.zeros_like(x)
    du = np.zeros_like(u)
    dw = np.zeros_like(w)
    db = np.zeros(4 * units)

    dh_next = np.zeros((batch, units))
    dc_next = np.zeros((batch, units))
    dz = np.empty((batch, 4 * units))
    for t in reversed(range(steps)):
        f = gates[:, t, :units]
        i = gates[:, t, units : 2 * units]
        g = gates[:, t, 2 * units : 3 * units]
        o = gates[:, t, 3 * units :]
        tc = tanh_c[:, t]

        dh = dh_seq[:, t] + dh_next
        dc = dc_next + dh * o * (1.0 - tc * tc)
        c_prev = c[:, t - 1] if t > 0 else np.zeros((batch, units))
        h_prev = h[:, t - 1] if t > 0 else np.zeros((batch, units))

        dz[:, :units] = dc * c_prev * f * (1.0 - f)
        dz[:, units : 2 * units] = dc * g * i * (1.0 - i)
        dz[:, 2 * units : 3 * units] = dc * i * (1.0 - g * g)
        dz[:, 3 * units :] = dh * tc * o * (1.0 - o)

        du += x[:, t].T @ dz
        dw += h_prev.T @ dz
        db += dz.sum(axis=0)
        dx[:, t] = dz @ u.T
        dh_next = dz @ w.T
        dc_next = dc * f
    return dx, du, dw, db
