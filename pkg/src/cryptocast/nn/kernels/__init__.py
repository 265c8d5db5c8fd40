"""Kernel selection: compiled Cython extension when built, numpy otherwise.

Set CRYPTOCAST_KERNEL=python to force the numpy fallback, or
CRYPTOCAST_KERNEL=cython to require the extension (ImportError if it
was not built). Both backends share signatures and semantics; the
equivalence is covered by tests.
"""

from __future__ import annotations

import os

from cryptocast.nn.kernels import reference

try:
    from cryptocast.nn.kernels import _lstm as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("CRYPTOCAST_KERNEL", "").strip().lower()
if _forced in ("python", "numpy"):
    _backend, _backend_name = reference, "python"
elif _forced == "cython":
    if _compiled is None:
        raise ImportError(
            "CRYPTOCAST_KERNEL=cython but the compiled extension is not built; "
            "reinstall with a C toolchain or unset the variable"
        )
    _backend, _backend_name = _compiled, "cython"
elif _forced:
    raise ImportError(f"unknown CRYPTOCAST_KERNEL value {_forced!r}; use 'python' or 'cython'")
elif _compiled is not None:
    _backend, _backend_name = _compiled, "cython"
else:
    _backend, _backend_name = reference, "python"

lstm_forward = _backend.lstm_forward
lstm_backward = _backend.lstm_backward


def active_kernel() -> str:
    """Name of the backend in use: 'cython' or 'python'."""
    return _backend_name


__all__ = ["active_kernel", "lstm_backward", "lstm_forward", "reference"]
