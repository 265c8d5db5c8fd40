"""Network definition: parameter containers, layer specs, and initialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GATE_ORDER = ("forget", "input", "candidate", "output")


class ModelError(ValueError):
    """Inconsistent network structure or parameters."""


@dataclass
class LstmCellParams:
    """Packed weights for one LSTM direction.

    u: (input_dim, 4*units), w: (units, 4*units), b: (4*units,), with
    gate columns ordered [forget, input, candidate, output]. Per-gate
    views (u_f, w_i, b_o, ...) slice the packed arrays without copying.
    """

    u: np.ndarray
    w: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        if self.w.ndim != 2 or self.w.shape[1] != 4 * self.w.shape[0]:
            raise ModelError(f"recurrent weights must be (units, 4*units), got {self.w.shape}")
        units = self.w.shape[0]
        if self.u.ndim != 2 or self.u.shape[1] != 4 * units:
            raise ModelError(f"input weights must be (input_dim, {4 * units}), got {self.u.shape}")
        if self.b.shape != (4 * units,):
            raise ModelError(f"bias must be ({4 * units},), got {self.b.shape}")
        for name, arr in (("u", self.u), ("w", self.w), ("b", self.b)):
            if not np.isfinite(arr).all():
                raise ModelError(f"non-finite values in {name}")

    @property
    def units(self) -> int:
        return self.w.shape[0]

    @property
    def input_dim(self) -> int:
        return self.u.shape[0]

    def _gate(self, arr: np.ndarray, gate: str) -> np.ndarray:
        idx = GATE_ORDER.index(gate)
        n = self.units
        return arr[..., idx * n : (idx + 1) * n]

    @property
    def u_f(self) -> np.ndarray:
        return self._gate(self.u, "forget")

    @property
    def u_i(self) -> np.ndarray:
        return self._gate(self.u, "input")

    @property
    def u_g(self) -> np.ndarray:
        return self._gate(self.u, "candidate")

    @property
    def u_o(self) -> np.ndarray:
        return self._gate(self.u, "output")

    @property
    def w_f(self) -> np.ndarray:
        return self._gate(self.w, "forget")

    @property
    def w_i(self) -> np.ndarray:
        return self._gate(self.w, "input")

    @property
    def w_g(self) -> np.ndarray:
        return self._gate(self.w, "candidate")

    @property
    def w_o(self) -> np.ndarray:
        return self._gate(self.w, "output")

    @property
    def b_f(self) -> np.ndarray:
        return self._gate(self.b, "forget")

    @property
    def b_i(self) -> np.ndarray:
        return self._gate(self.b, "input")

    @property
    def b_g(self) -> np.ndarray:
        return self._gate(self.b, "candidate")

    @property
    def b_o(self) -> np.ndarray:
        return self._gate(self.b, "output")


@dataclass(frozen=True)
class CellState:
    """Hidden and cell state of one LSTM direction at one step."""

    h: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        if self.h.shape != self.c.shape:
            raise ModelError(f"state shapes differ: h {self.h.shape} vs c {self.c.shape}")


@dataclass
class DenseParams:
    """Single-output linear head: w (input_dim, 1), b (1,)."""

    w: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        if self.w.ndim != 2 or self.w.shape[1] != 1:
            raise ModelError(f"dense weights must be (input_dim, 1), got {self.w.shape}")
        if self.b.shape != (1,):
            raise ModelError(f"dense bias must be (1,), got {self.b.shape}")
        if not (np.isfinite(self.w).all() and np.isfinite(self.b).all()):
            raise ModelError("non-finite values in dense parameters")


@dataclass(frozen=True)
class LayerSpec:
    """Declarative layer description used to build and validate networks."""

    kind: str  # "lstm", "bilstm", or "dense"
    units: int
    return_sequences: bool = False
    activation: str = "default"

    def __post_init__(self) -> None:
        if self.kind not in ("lstm", "bilstm", "dense"):
            raise ModelError(f"unknown layer kind {self.kind!r}")
        if self.units < 1:
            raise ModelError(f"units must be >= 1, got {self.units}")
        # canonicalize so specs compare equal regardless of how they were spelled
        resolved = self.resolved_activation()
        object.__setattr__(self, "activation", resolved)
        if self.kind == "dense":
            if resolved != "linear":
                raise ModelError(f"dense layer supports linear activation, got {resolved!r}")
            if self.return_sequences:
                raise ModelError("dense layer cannot return sequences")
        elif resolved != "tanh":
            raise ModelError(f"recurrent layers use tanh activation, got {resolved!r}")

    def resolved_activation(self) -> str:
        if self.activation != "default":
            return self.activation
        return "linear" if self.kind == "dense" else "tanh"

    def output_width(self) -> int:
        return 2 * self.units if self.kind == "bilstm" else self.units


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_lstm_cell(rng: np.random.Generator, input_dim: int, units: int) -> LstmCellParams:
    """Glorot-uniform weights; forget bias 1.0, other biases 0."""
    u = _glorot(rng, input_dim, units, (input_dim, 4 * units))
    w = _glorot(rng, units, units, (units, 4 * units))
    b = np.zeros(4 * units)
    b[:units] = 1.0
    return LstmCellParams(u=u, w=w, b=b)


def init_dense(rng: np.random.Generator, input_dim: int) -> DenseParams:
    w = _glorot(rng, input_dim, 1, (input_dim, 1))
    return DenseParams(w=w, b=np.zeros(1))


@dataclass
class NetworkModel:
    """Layer specs plus their parameters.

    params[i] is LstmCellParams for lstm, a (forward, backward) pair of
    LstmCellParams for bilstm, or DenseParams for dense. All recurrent
    layers below the last recurrent layer must return sequences; the
    final layer must be a single-unit dense head.
    """

    specs: tuple[LayerSpec, ...]
    params: list = field(default_factory=list)
    input_width: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.specs:
            raise ModelError("network needs at least one layer")
        if self.specs[-1].kind != "dense" or self.specs[-1].units != 1:
            raise ModelError("final layer must be dense with 1 unit")
        recurrent = [i for i, s in enumerate(self.specs) if s.kind != "dense"]
        if not recurrent:
            raise ModelError("network needs at least one recurrent layer")
        for idx in recurrent[:-1]:
            if not self.specs[idx].return_sequences:
                raise ModelError(f"recurrent layer {idx} below the top must return sequences")
        if self.specs[recurrent[-1]].return_sequences:
            raise ModelError("top recurrent layer must not return sequences")
        for i, spec in enumerate(self.specs[:-1]):
            if spec.kind == "dense":
                raise ModelError(f"layer {i}: dense layers are only supported as the final head")
        if len(self.params) != len(self.specs):
            raise ModelError(f"{len(self.params)} parameter sets for {len(self.specs)} layers")
        width = self.input_width
        for i, (spec, p) in enumerate(zip(self.specs, self.params)):
            if spec.kind == "lstm":
                if not isinstance(p, LstmCellParams) or p.input_dim != width or p.units != spec.units:
                    raise ModelError(f"layer {i}: lstm parameters do not match spec/width {width}")
            elif spec.kind == "bilstm":
                if not (isinstance(p, tuple) and len(p) == 2):
                    raise ModelError(f"layer {i}: bilstm needs (forward, backward) parameters")
                for cell in p:
                    if not isinstance(cell, LstmCellParams) or cell.input_dim != width or cell.units != spec.units:
                        raise ModelError(f"layer {i}: bilstm parameters do not match spec/width {width}")
            else:
                if not isinstance(p, DenseParams) or p.w.shape[0] != width:
                    raise ModelError(f"layer {i}: dense parameters do not match width {width}")
            width = spec.output_width()

    @classmethod
    def initialize(cls, specs, input_width: int = 1, seed: int = 0) -> "NetworkModel":
        """Build a model with seeded Glorot-uniform weights."""
        specs = tuple(specs)
        rng = np.random.default_rng(seed)
        params = []
        width = input_width
        for spec in specs:
            if spec.kind == "lstm":
                params.append(init_lstm_cell(rng, width, spec.units))
            elif spec.kind == "bilstm":
                fwd = init_lstm_cell(rng, width, spec.units)
                bwd = init_lstm_cell(rng, width, spec.units)
                params.append((fwd, bwd))
            else:
                params.append(init_dense(rng, width))
            width = spec.output_width()
        return cls(specs=specs, params=params, input_width=input_width, seed=seed)

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        """Flat (name, array) list in a fixed order; arrays are live views."""
        out: list[tuple[str, np.ndarray]] = []
        for i, (spec, p) in enumerate(zip(self.specs, self.params)):
            if spec.kind == "lstm":
                out += [(f"layer{i}.u", p.u), (f"layer{i}.w", p.w), (f"layer{i}.b", p.b)]
            elif spec.kind == "bilstm":
                fwd, bwd = p
                out += [
                    (f"layer{i}.fwd.u", fwd.u),
                    (f"layer{i}.fwd.w", fwd.w),
                    (f"layer{i}.fwd.b", fwd.b),
                    (f"layer{i}.bwd.u", bwd.u),
                    (f"layer{i}.bwd.w", bwd.w),
                    (f"layer{i}.bwd.b", bwd.b),
                ]
            else:
                out += [(f"layer{i}.w", p.w), (f"layer{i}.b", p.b)]
        return out

    def copy_weights(self) -> list[np.ndarray]:
        return [arr.copy() for _, arr in self.parameters()]

    def set_weights(self, weights: list[np.ndarray]) -> None:
        current = self.parameters()
        if len(weights) != len(current):
            raise ModelError(f"expected {len(current)} arrays, got {len(weights)}")
        for (name, arr), new in zip(current, weights):
            if arr.shape != new.shape:
                raise ModelError(f"{name}: shape {new.shape} does not match {arr.shape}")
            arr[...] = new


def layer_specs(kind: str, units) -> tuple[LayerSpec, ...]:
    """Spec tuple for a stack of lstm or bilstm layers plus a dense head."""
    if kind not in ("lstm", "bilstm"):
        raise ModelError(f"stack kind must be 'lstm' or 'bilstm', got {kind!r}")
    units = tuple(int(x) for x in units)
    if not units:
        raise ModelError("need at least one recurrent layer size")
    specs = [
        LayerSpec(kind=kind, units=n, return_sequences=(i < len(units) - 1))
        for i, n in enumerate(units)
    ]
    specs.append(LayerSpec(kind="dense", units=1))
    return tuple(specs)


def stack(kind: str, units, input_width: int = 1, seed: int = 0) -> NetworkModel:
    """Convenience builder: initialized weights for layer_specs(kind, units)."""
    return NetworkModel.initialize(layer_specs(kind, units), input_width=input_width, seed=seed)
