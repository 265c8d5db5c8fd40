"""Sliding-window dataset construction for sequence regression.

Each sample covers n consecutive normalized closes; the target is the
next close. Sentiment variants append one extra timestep carrying a
single day's score, so inputs stay a rank-3 (count, length, 1) block
that recurrent layers consume directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class WindowError(ValueError):
    """Invalid windowing request or malformed dataset."""


@dataclass(frozen=True)
class WindowedDataset:
    """Supervised sequence batch: inputs (count, length, 1), targets (count,)."""

    inputs: np.ndarray
    targets: np.ndarray
    window_n: int
    sentiment_mode: str  # "none", "current", or "previous"

    def __post_init__(self) -> None:
        if self.sentiment_mode not in ("none", "current", "previous"):
            raise WindowError(f"unknown sentiment_mode {self.sentiment_mode!r}")
        if self.inputs.ndim != 3 or self.inputs.shape[2] != 1:
            raise WindowError(f"inputs must have shape (count, length, 1), got {self.inputs.shape}")
        if self.targets.ndim != 1 or self.targets.shape[0] != self.inputs.shape[0]:
            raise WindowError(
                f"targets shape {self.targets.shape} does not match inputs {self.inputs.shape}"
            )
        expected = self.window_n if self.sentiment_mode == "none" else self.window_n + 1
        if self.inputs.shape[1] != expected:
            raise WindowError(
                f"inputs length {self.inputs.shape[1]} != expected {expected} "
                f"for n={self.window_n}, mode={self.sentiment_mode}"
            )
        if not (np.isfinite(self.inputs).all() and np.isfinite(self.targets).all()):
            raise WindowError("dataset contains non-finite values")

    def __len__(self) -> int:
        return self.inputs.shape[0]


def _check_window(series: np.ndarray, n: int) -> np.ndarray:
    if n < 1:
        raise WindowError(f"window size must be >= 1, got {n}")
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 1:
        raise WindowError(f"series must be one-dimensional, got shape {arr.shape}")
    if len(arr) <= n:
        raise WindowError(f"series of length {len(arr)} is too short for window size {n}")
    return arr


def seq_plain(series, n: int) -> WindowedDataset:
    """Price-only windows: input series[i-n:i], target series[i], for i in [n, len)."""
    arr = _check_window(series, n)
    count = len(arr) - n
    base = np.lib.stride_tricks.sliding_window_view(arr, n)[:count]
    inputs = np.ascontiguousarray(base, dtype=np.float64).reshape(count, n, 1)
    return WindowedDataset(
        inputs=inputs,
        targets=arr[n:].copy(),
        window_n=n,
        sentiment_mode="none",
    )


def seq_with_cur_sent(series, scores, n: int) -> WindowedDataset:
    """Windows with the target day's sentiment appended as one extra step.

    Input for day i is series[i-n:i] followed by scores[i]; target is
    series[i]. Both arrays must share one date axis.
    """
    arr = _check_window(series, n)
    sc = np.asarray(scores, dtype=np.float64)
    if sc.shape != arr.shape:
        raise WindowError(f"scores shape {sc.shape} does not match series shape {arr.shape}")
    count = len(arr) - n
    base = np.lib.stride_tricks.sliding_window_view(arr, n)[:count]
    inputs = np.concatenate([base, sc[n:, None]], axis=1).reshape(count, n + 1, 1)
    return WindowedDataset(
        inputs=np.ascontiguousarray(inputs),
        targets=arr[n:].copy(),
        window_n=n,
        sentiment_mode="current",
    )


def seq_with_prev_sent(series, scores, n: int) -> WindowedDataset:
    """Windows with the previous day's sentiment appended as one extra step.

    Input for day i is series[i-n:i] followed by scores[i-1]; target is
    series[i]. Usable for real next-day forecasting since scores[i] is
    never needed.
    """
    arr = _check_window(series, n)
    sc = np.asarray(scores, dtype=np.float64)
    if sc.shape != arr.shape:
        raise WindowError(f"scores shape {sc.shape} does not match series shape {arr.shape}")
    count = len(arr) - n
    base = np.lib.stride_tricks.sliding_window_view(arr, n)[:count]
    inputs = np.concatenate([base, sc[n - 1 : len(arr) - 1, None]], axis=1).reshape(count, n + 1, 1)
    return WindowedDataset(
        inputs=np.ascontiguousarray(inputs),
        targets=arr[n:].copy(),
        window_n=n,
        sentiment_mode="previous",
    )
