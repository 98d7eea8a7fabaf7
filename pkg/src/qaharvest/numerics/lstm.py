"""LSTM cell with stacked gate weights.

Gate blocks are stacked row-wise in the order [input; forget; output;
candidate], so one matmul per step covers all four gates. With all
parameters zero and c_prev = 0 the cell outputs (0, 0): the gates sit at
sigmoid(0) = 0.5 and the candidate at tanh(0) = 0.
"""

from __future__ import annotations

from .params import Parameter, ParameterStore
from .rng import RngState
from .tensor import Tensor, add, matmul, mul, narrow, sigmoid, tanh

__all__ = ["LstmCellParams", "lstm_step"]


class LstmCellParams:
    """Weights for one cell: W_x (4H, I), W_h (4H, H), bias (4H,)."""

    def __init__(self, store: ParameterStore, prefix: str, input_dim: int, hidden_dim: int, rng: RngState | None = None):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.w_input = store.create(f"{prefix}.w_input", (4 * hidden_dim, input_dim), rng)
        self.w_hidden = store.create(f"{prefix}.w_hidden", (4 * hidden_dim, hidden_dim), rng)
        self.bias = store.create(f"{prefix}.bias", (4 * hidden_dim,), rng)


def lstm_step(x: Tensor, h_prev: Tensor, c_prev: Tensor, p: LstmCellParams) -> tuple[Tensor, Tensor]:
    """One recurrence step; returns (h, c) with |h_j| < 1 elementwise."""
    if x.data.shape != (p.input_dim,):
        raise ValueError(f"input dim {x.data.shape} != ({p.input_dim},)")
    if h_prev.data.shape != (p.hidden_dim,) or c_prev.data.shape != (p.hidden_dim,):
        raise ValueError("state dims do not match cell")
    h = p.hidden_dim
    pre = add(add(matmul(p.w_input, x), matmul(p.w_hidden, h_prev)), p.bias)
    gate_in = sigmoid(narrow(pre, 0, h))
    gate_forget = sigmoid(narrow(pre, h, h))
    gate_out = sigmoid(narrow(pre, 2 * h, h))
    candidate = tanh(narrow(pre, 3 * h, h))
    c = add(mul(gate_forget, c_prev), mul(gate_in, candidate))
    h_new = mul(gate_out, tanh(c))
    return h_new, c
