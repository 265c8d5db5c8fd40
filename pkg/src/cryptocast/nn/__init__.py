"""From-scratch recurrent network: LSTM/Bi-LSTM layers, BPTT, Adam, checkpoints."""

from cryptocast.nn.model import (
    CellState,
    DenseParams,
    LayerSpec,
    LstmCellParams,
    ModelError,
    NetworkModel,
    layer_specs,
    stack,
)
from cryptocast.nn.layers import (
    backward,
    bilstm_layer_forward,
    forward_batch,
    lstm_cell_forward,
    lstm_layer_forward,
    network_forward,
    sigmoid,
    tanh_act,
)
from cryptocast.nn.training import (
    AdamState,
    TrainHistory,
    TrainingDiverged,
    adam_step,
    mse_loss,
    train,
)
from cryptocast.nn.checkpoint import CheckpointError, load_checkpoint, save_checkpoint

__all__ = [
    "AdamState",
    "CellState",
    "CheckpointError",
    "DenseParams",
    "LayerSpec",
    "LstmCellParams",
    "ModelError",
    "NetworkModel",
    "TrainHistory",
    "TrainingDiverged",
    "adam_step",
    "backward",
    "bilstm_layer_forward",
    "forward_batch",
    "layer_specs",
    "load_checkpoint",
    "lstm_cell_forward",
    "lstm_layer_forward",
    "mse_loss",
    "network_forward",
    "save_checkpoint",
    "sigmoid",
    "stack",
    "tanh_act",
    "train",
]
