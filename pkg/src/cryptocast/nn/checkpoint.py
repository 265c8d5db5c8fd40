"""Model checkpoints: JSON header plus raw little-endian float64 arrays.

Layout: 8-byte magic, uint32 little-endian header length, UTF-8 JSON
header (sorted keys), then each parameter array's bytes in header
order, C-contiguous '<f8'. The header records the layer specs, input
width, seed, and an array manifest (name, shape) so a file is fully
self-describing.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from cryptocast.nn.model import LayerSpec, ModelError, NetworkModel

MAGIC = b"CCAST001"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Corrupt, truncated, or incompatible checkpoint file."""


def save_checkpoint(model: NetworkModel, path) -> None:
    """Write the model's specs and weights to path (parent dirs created)."""
    named = model.parameters()
    header = {
        "format_version": FORMAT_VERSION,
        "input_width": model.input_width,
        "seed": model.seed,
        "layers": [
            {
                "kind": s.kind,
                "units": s.units,
                "return_sequences": s.return_sequences,
                "activation": s.resolved_activation(),
            }
            for s in model.specs
        ],
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in named],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for _, arr in named:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> NetworkModel:
    """Read a checkpoint written by save_checkpoint and rebuild the model."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(raw) < len(MAGIC) + 4 or raw[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path} is not a model checkpoint (bad magic)")
    (header_len,) = struct.unpack("<I", raw[len(MAGIC) : len(MAGIC) + 4])
    body_start = len(MAGIC) + 4 + header_len
    if len(raw) < body_start:
        raise CheckpointError(f"{path} is truncated inside the header")
    try:
        header = json.loads(raw[len(MAGIC) + 4 : body_start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path} has a corrupt header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path} uses format version {header.get('format_version')}, expected {FORMAT_VERSION}"
        )

    try:
        specs = tuple(
            LayerSpec(
                kind=layer["kind"],
                units=int(layer["units"]),
                return_sequences=bool(layer["return_sequences"]),
                activation=layer["activation"],
            )
            for layer in header["layers"]
        )
        manifest = [(entry["name"], tuple(int(d) for d in entry["shape"])) for entry in header["arrays"]]
        input_width = int(header["input_width"])
        seed = int(header.get("seed", 0))
    except (KeyError, TypeError, ModelError) as exc:
        raise CheckpointError(f"{path} has an invalid header: {exc}") from exc

    arrays = []
    offset = body_start
    for name, shape in manifest:
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = count * 8
        if len(raw) < offset + nbytes:
            raise CheckpointError(f"{path} is truncated in array {name}")
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(shape).copy()
        arrays.append(arr)
        offset += nbytes
    if offset != len(raw):
        raise CheckpointError(f"{path} has {len(raw) - offset} trailing byte(s)")

    model = NetworkModel.initialize(specs, input_width=input_width, seed=seed)
    expected = [(name, arr.shape) for name, arr in model.parameters()]
    if expected != manifest:
        raise CheckpointError(f"{path} array manifest does not match the declared layers")
    model.set_weights(arrays)
    return model
