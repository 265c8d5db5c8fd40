"""Forward and backward passes for LSTM, Bi-LSTM, and the dense head.

Batched sequence math is delegated to the kernel backend (compiled or
numpy). The backward pass returns exact analytic gradients of the mean
squared error, verified against finite differences in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from cryptocast.nn import kernels
from cryptocast.nn.model import CellState, LstmCellParams, ModelError, NetworkModel
from cryptocast.windows import WindowedDataset


def sigmoid(z):
    """Logistic function, numerically stable for large |z|."""
    return expit(np.asarray(z, dtype=np.float64))


def tanh_act(z):
    """Hyperbolic tangent activation."""
    return np.tanh(np.asarray(z, dtype=np.float64))


def lstm_cell_forward(x_t: np.ndarray, prev: CellState, params: LstmCellParams):
    """One LSTM step for a single sample.

    x_t: (input_dim,), prev holds h and c of shape (units,).
    Returns (CellState, gate cache dict).
    """
    x_t = np.asarray(x_t, dtype=np.float64)
    if x_t.shape != (params.input_dim,):
        raise ModelError(f"x_t shape {x_t.shape} does not match input_dim {params.input_dim}")
    if prev.h.shape != (params.units,):
        raise ModelError(f"state shape {prev.h.shape} does not match units {params.units}")
    n = params.units
    z = x_t @ params.u + prev.h @ params.w + params.b
    f = expit(z[:n])
    i = expit(z[n : 2 * n])
    g = np.tanh(z[2 * n : 3 * n])
    o = expit(z[3 * n :])
    c = f * prev.c + i * g
    h = o * np.tanh(c)
    state = CellState(h=h, c=c)
    cache = {"forget": f, "input": i, "candidate": g, "output": o, "c": c}
    return state, cache


def _as_sequence(sequence, input_dim: int) -> np.ndarray:
    arr = np.asarray(sequence, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != input_dim:
        raise ModelError(f"sequence shape {arr.shape} does not match input_dim {input_dim}")
    if arr.shape[0] < 1:
        raise ModelError("sequence must have at least one step")
    return arr


def lstm_layer_forward(sequence, params: LstmCellParams, return_sequences: bool = False):
    """Run one LSTM over a single sequence (steps, input_dim).

    Returns (output, cache): output is (steps, units) when
    return_sequences else (units,).
    """
    arr = _as_sequence(sequence, params.input_dim)
    h, c, gates, tanh_c = kernels.lstm_forward(arr[None], params.u, params.w, params.b)
    cache = {"h": h, "c": c, "gates": gates, "tanh_c": tanh_c}
    out = h[0] if return_sequences else h[0, -1]
    return out, cache


def bilstm_layer_forward(sequence, fwd_params: LstmCellParams, bwd_params: LstmCellParams, return_sequences: bool = False):
    """Run forward and backward LSTMs over one sequence and concatenate.

    Per-step output is [h_forward(t); h_backward(t)] where the backward
    direction consumes the sequence reversed. Without return_sequences
    the output is [h_forward(last); h_backward final state].
    """
    arr = _as_sequence(sequence, fwd_params.input_dim)
    if bwd_params.input_dim != fwd_params.input_dim or bwd_params.units != fwd_params.units:
        raise ModelError("forward and backward cells must share input_dim and units")
    fwd = kernels.lstm_forward(arr[None], fwd_params.u, fwd_params.w, fwd_params.b)
    rev = np.ascontiguousarray(arr[::-1])
    bwd = kernels.lstm_forward(rev[None], bwd_params.u, bwd_params.w, bwd_params.b)
    cache = {"fwd": fwd, "bwd": bwd}
    if return_sequences:
        out = np.concatenate([fwd[0][0], bwd[0][0][::-1]], axis=1)
    else:
        out = np.concatenate([fwd[0][0, -1], bwd[0][0, -1]])
    return out, cache


@dataclass
class ForwardCache:
    """Everything backward() needs: per-layer activations plus predictions."""

    inputs: np.ndarray
    layer_caches: list
    preds: np.ndarray


def forward_batch(model: NetworkModel, inputs: np.ndarray):
    """Forward pass over a batch (count, steps, input_width).

    Returns (preds, ForwardCache) with preds shape (count,).
    """
    x = np.ascontiguousarray(inputs, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != model.input_width:
        raise ModelError(f"inputs must be (count, steps, {model.input_width}), got {x.shape}")
    original = x
    layer_caches = []
    for spec, p in zip(model.specs, model.params):
        if spec.kind == "lstm":
            h, c, gates, tanh_c = kernels.lstm_forward(x, p.u, p.w, p.b)
            layer_caches.append({"kind": "lstm", "x": x, "run": (h, c, gates, tanh_c)})
            x = h if spec.return_sequences else h[:, -1]
        elif spec.kind == "bilstm":
            fwd_p, bwd_p = p
            fwd = kernels.lstm_forward(x, fwd_p.u, fwd_p.w, fwd_p.b)
            x_rev = np.ascontiguousarray(x[:, ::-1])
            bwd = kernels.lstm_forward(x_rev, bwd_p.u, bwd_p.w, bwd_p.b)
            layer_caches.append({"kind": "bilstm", "x": x, "fwd": fwd, "bwd": bwd})
            if spec.return_sequences:
                x = np.concatenate([fwd[0], bwd[0][:, ::-1]], axis=2)
            else:
                x = np.concatenate([fwd[0][:, -1], bwd[0][:, -1]], axis=1)
        else:
            layer_caches.append({"kind": "dense", "x": x})
            x = x @ p.w + p.b
        if x.ndim == 3:
            x = np.ascontiguousarray(x)
    preds = x[:, 0]
    return preds, ForwardCache(inputs=original, layer_caches=layer_caches, preds=preds)


def network_forward(model: NetworkModel, sequence):
    """Forward pass over a single sequence. Returns (prediction, cache)."""
    arr = _as_sequence(sequence, model.input_width)
    preds, cache = forward_batch(model, arr[None])
    return float(preds[0]), cache


def _batch_arrays(batch):
    if isinstance(batch, WindowedDataset):
        return batch.inputs, batch.targets
    inputs, targets = batch
    return np.asarray(inputs, dtype=np.float64), np.asarray(targets, dtype=np.float64)


def backward(model: NetworkModel, batch, caches: ForwardCache) -> list[np.ndarray]:
    """Gradients of mse_loss over the batch w.r.t. every parameter.

    caches must come from forward_batch on the same inputs. The result
    aligns with model.parameters() order.
    """
    inputs, targets = _batch_arrays(batch)
    if caches.inputs is not inputs and (
        caches.inputs.shape != inputs.shape or not np.array_equal(caches.inputs, inputs)
    ):
        raise ModelError("stale cache: forward pass does not match this batch")
    count = inputs.shape[0]
    if targets.shape != (count,):
        raise ModelError(f"targets shape {targets.shape} does not match batch size {count}")

    # d(mse)/d(pred) for mse = mean((pred - y)^2)
    upstream = (2.0 / count) * (caches.preds - targets)

    grads_reversed: list[np.ndarray] = []
    grad = upstream
    for spec, p, cache in zip(
        reversed(model.specs), reversed(model.params), reversed(caches.layer_caches)
    ):
        if spec.kind == "dense":
            x = cache["x"]
            dout = grad[:, None]
            dw = x.T @ dout
            db = dout.sum(axis=0)
            grads_reversed += [db, dw]
            grad = dout @ p.w.T
        elif spec.kind == "lstm":
            x = cache["x"]
            h, c, gates, tanh_c = cache["run"]
            steps, units = h.shape[1], h.shape[2]
            if spec.return_sequences:
                dh_seq = grad
            else:
                dh_seq = np.zeros_like(h)
                dh_seq[:, -1] = grad
            dx, du, dw, db = kernels.lstm_backward(x, p.u, p.w, h, c, gates, tanh_c, dh_seq)
            grads_reversed += [db, dw, du]
            grad = dx
        else:
            x = cache["x"]
            fwd_p, bwd_p = p
            fh, fc, fg, ftc = cache["fwd"]
            bh, bc, bg, btc = cache["bwd"]
            units = spec.units
            if spec.return_sequences:
                dh_fwd = np.ascontiguousarray(grad[:, :, :units])
                # backward direction ran on the reversed sequence, so its
                # upstream gradient is the tail slice flipped in time
                dh_bwd = np.ascontiguousarray(grad[:, ::-1, units:])
            else:
                dh_fwd = np.zeros_like(fh)
                dh_fwd[:, -1] = grad[:, :units]
                dh_bwd = np.zeros_like(bh)
                dh_bwd[:, -1] = grad[:, units:]
            x_rev = np.ascontiguousarray(x[:, ::-1])
            dxf, duf, dwf, dbf = kernels.lstm_backward(x, fwd_p.u, fwd_p.w, fh, fc, fg, ftc, dh_fwd)
            dxb, dub, dwb, dbb = kernels.lstm_backward(x_rev, bwd_p.u, bwd_p.w, bh, bc, bg, btc, dh_bwd)
            grads_reversed += [dbb, dwb, dub, dbf, dwf, duf]
            grad = dxf + dxb[:, ::-1]
    return list(reversed(grads_reversed))
