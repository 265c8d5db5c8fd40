"""Network structure: specs, initialization, parameter plumbing."""

import numpy as np
import pytest

from cryptocast.nn.model import (
    GATE_ORDER,
    DenseParams,
    LayerSpec,
    LstmCellParams,
    ModelError,
    NetworkModel,
    init_dense,
    init_lstm_cell,
    layer_specs,
    stack,
)


class TestLayerSpec:
    def test_canonical_activation(self):
        assert LayerSpec("lstm", 4).activation == "tanh"
        assert LayerSpec("dense", 1).activation == "linear"
        assert LayerSpec("lstm", 4) == LayerSpec("lstm", 4, activation="tanh")

    def test_invalid_kind(self):
        with pytest.raises(ModelError):
            LayerSpec("gru", 4)

    def test_invalid_units(self):
        with pytest.raises(ModelError):
            LayerSpec("lstm", 0)

    def test_dense_activation_locked(self):
        with pytest.raises(ModelError):
            LayerSpec("dense", 1, activation="tanh")
        with pytest.raises(ModelError):
            LayerSpec("lstm", 4, activation="relu")

    def test_dense_no_sequences(self):
        with pytest.raises(ModelError):
            LayerSpec("dense", 1, return_sequences=True)

    def test_output_width(self):
        assert LayerSpec("lstm", 6).output_width() == 6
        assert LayerSpec("bilstm", 6).output_width() == 12


class TestInit:
    def test_glorot_bounds_and_forget_bias(self):
        rng = np.random.default_rng(0)
        cell = init_lstm_cell(rng, input_dim=3, units=8)
        lim_u = np.sqrt(6.0 / (3 + 8))
        lim_w = np.sqrt(6.0 / (8 + 8))
        assert (np.abs(cell.u) <= lim_u).all()
        assert (np.abs(cell.w) <= lim_w).all()
        np.testing.assert_array_equal(cell.b_f, np.ones(8))
        np.testing.assert_array_equal(cell.b[8:], np.zeros(24))

    def test_dense_init(self):
        rng = np.random.default_rng(0)
        dense = init_dense(rng, input_dim=5)
        assert dense.w.shape == (5, 1)
        assert dense.b.shape == (1,)
        assert dense.b[0] == 0.0

    def test_seed_reproducible(self):
        a = NetworkModel.initialize(layer_specs("lstm", (4, 3)), seed=7)
        b = NetworkModel.initialize(layer_specs("lstm", (4, 3)), seed=7)
        for (name_a, arr_a), (name_b, arr_b) in zip(a.parameters(), b.parameters()):
            assert name_a == name_b
            np.testing.assert_array_equal(arr_a, arr_b)

    def test_seed_changes_weights(self):
        a = NetworkModel.initialize(layer_specs("lstm", (4,)), seed=1)
        b = NetworkModel.initialize(layer_specs("lstm", (4,)), seed=2)
        diffs = [
            not np.array_equal(x, y)
            for (_, x), (_, y) in zip(a.parameters(), b.parameters())
        ]
        assert any(diffs)


class TestGateViews:
    def test_views_slice_packed_arrays(self):
        rng = np.random.default_rng(1)
        cell = init_lstm_cell(rng, input_dim=2, units=3)
        assert cell.units == 3 and cell.input_dim == 2
        suffixes = {"forget": "f", "input": "i", "candidate": "g", "output": "o"}
        for idx, gate in enumerate(GATE_ORDER):
            view = getattr(cell, f"u_{suffixes[gate]}")
            np.testing.assert_array_equal(view, cell.u[:, idx * 3 : (idx + 1) * 3])
        # views alias, not copy
        cell.b_i[:] = 5.0
        np.testing.assert_array_equal(cell.b[3:6], [5.0, 5.0, 5.0])

    def test_shape_validation(self):
        with pytest.raises(ModelError):
            LstmCellParams(u=np.zeros((2, 12)), w=np.zeros((3, 11)), b=np.zeros(12))
        with pytest.raises(ModelError):
            LstmCellParams(u=np.zeros((2, 8)), w=np.zeros((3, 12)), b=np.zeros(12))
        with pytest.raises(ModelError):
            DenseParams(w=np.zeros((4, 2)), b=np.zeros(1))


class TestNetworkModel:
    def test_stack_structure(self):
        model = stack("lstm", (5, 3))
        kinds = [s.kind for s in model.specs]
        assert kinds == ["lstm", "lstm", "dense"]
        assert [s.return_sequences for s in model.specs] == [True, False, False]

    def test_bilstm_params_are_direction_pairs(self):
        model = stack("bilstm", (4,))
        fwd, bwd = model.params[0]
        assert fwd.u.shape == (1, 16)
        assert bwd.u.shape == (1, 16)
        # second bilstm layer consumes 2*units features
        deeper = stack("bilstm", (4, 3))
        fwd2, _ = deeper.params[1]
        assert fwd2.u.shape == (8, 12)

    def test_dense_head_dimension_chains(self):
        model = stack("lstm", (6, 4))
        assert model.params[-1].w.shape == (4, 1)
        bi = stack("bilstm", (6, 4))
        assert bi.params[-1].w.shape == (8, 1)

    def test_parameters_order_and_liveness(self):
        model = stack("bilstm", (3,))
        names = [name for name, _ in model.parameters()]
        assert names == [
            "layer0.fwd.u", "layer0.fwd.w", "layer0.fwd.b",
            "layer0.bwd.u", "layer0.bwd.w", "layer0.bwd.b",
            "layer1.w", "layer1.b",
        ]
        # returned arrays are the live ones
        _, first = model.parameters()[0]
        first[0, 0] = 123.0
        assert model.params[0][0].u[0, 0] == 123.0

    def test_copy_and_set_weights(self):
        model = stack("lstm", (4, 3), seed=0)
        snap = model.copy_weights()
        orig = snap[0].copy()
        model.parameters()[0][1][:] = 0.0
        assert not np.array_equal(model.parameters()[0][1], orig)
        model.set_weights(snap)
        np.testing.assert_array_equal(model.parameters()[0][1], orig)
        # snapshot is detached
        snap[0][:] = -1.0
        assert not np.array_equal(model.parameters()[0][1], snap[0])

    def test_set_weights_shape_check(self):
        model = stack("lstm", (4,))
        snap = model.copy_weights()
        snap[0] = snap[0][:, :1]
        with pytest.raises(ModelError):
            model.set_weights(snap)

    def test_final_layer_must_be_dense_one(self):
        with pytest.raises(ModelError):
            NetworkModel.initialize((LayerSpec("lstm", 4),))
        with pytest.raises(ModelError):
            NetworkModel.initialize(
                (LayerSpec("lstm", 4, return_sequences=False), LayerSpec("dense", 2))
            )

    def test_inner_layers_must_return_sequences(self):
        with pytest.raises(ModelError):
            NetworkModel.initialize(
                (
                    LayerSpec("lstm", 4, return_sequences=False),
                    LayerSpec("lstm", 3, return_sequences=False),
                    LayerSpec("dense", 1),
                )
            )

    def test_top_recurrent_must_not_return_sequences(self):
        with pytest.raises(ModelError):
            NetworkModel.initialize(
                (LayerSpec("lstm", 4, return_sequences=True), LayerSpec("dense", 1))
            )

    def test_layer_specs_helper(self):
        specs = layer_specs("bilstm", (55, 25, 20))
        assert len(specs) == 4
        assert specs[0].units == 55 and specs[2].units == 20
        assert specs[3] == LayerSpec("dense", 1)
        with pytest.raises(ModelError):
            layer_specs("gru", (4,))
        with pytest.raises(ModelError):
            layer_specs("lstm", ())

    def test_paper_scale_shapes(self):
        model = stack("lstm", (50, 30, 20))
        assert model.params[0].u.shape == (1, 200)
        assert model.params[1].u.shape == (50, 120)
        assert model.params[2].u.shape == (30, 80)
        assert model.params[3].w.shape == (20, 1)
