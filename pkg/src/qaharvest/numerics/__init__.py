"""Differentiable-computation core: tensors with reverse-mode autodiff,
an LSTM cell, parameter storage and checkpoints, SGD with gradient
clipping, inverted dropout, a seeded PRNG, and a finite-difference
gradient checker."""

from .dropout import apply_dropout, dropout_mask
from .gradcheck import grad_check
from .lstm import LstmCellParams, lstm_step
from .params import Parameter, ParameterStore, sgd_step
from .rng import RngState
from .tensor import (
    Tensor,
    as_tensor,
    add,
    matmul,
    mul,
    clamp_min,
    concat,
    dot,
    exp,
    gather2d,
    log,
    logsumexp,
    narrow,
    pad_to,
    pick,
    relu,
    reshape,
    row,
    scatter_add,
    sigmoid,
    slice2d,
    softmax,
    softmax_rows,
    stack,
    tanh,
    tsum,
)

__all__ = [
    "Tensor",
    "as_tensor",
    "add",
    "mul",
    "matmul",
    "RngState",
    "Parameter",
    "ParameterStore",
    "sgd_step",
    "LstmCellParams",
    "lstm_step",
    "grad_check",
    "dropout_mask",
    "apply_dropout",
    "sigmoid",
    "tanh",
    "relu",
    "exp",
    "log",
    "clamp_min",
    "tsum",
    "dot",
    "softmax",
    "softmax_rows",
    "logsumexp",
    "concat",
    "stack",
    "row",
    "pick",
    "narrow",
    "slice2d",
    "gather2d",
    "scatter_add",
    "pad_to",
    "reshape",
]
