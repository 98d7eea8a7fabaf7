"""Reverse-mode automatic differentiation over dense float64 arrays.

A ``Tensor`` wraps a numpy array plus the tape bookkeeping needed for
backpropagation. Only the ops the models in this package need are
provided: elementwise arithmetic with broadcasting, matmul, sigmoid /
tanh / relu, stable softmax and log-sum-exp, concatenation / stacking,
and the indexing ops used for embeddings, CRF scoring, and the copy
distribution. Gradients accumulate into ``.grad`` (a plain ndarray) on
tensors created with ``requires_grad=True``.

Tensors are safe for concurrent read-only use; graph construction and
backward passes belong to a single owner.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Tensor",
    "as_tensor",
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


class Tensor:
    """Node in the autodiff graph; ``data`` is always a float64 ndarray."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple = ()
        self._backward = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data.item())

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def backward(self) -> None:
        """Backpropagate from a scalar; accumulates into leaf ``.grad``s."""
        if self.data.ndim != 0:
            raise ValueError("backward() requires a scalar")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack_ = [(self, False)]
        while stack_:
            node, expanded = stack_.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack_.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack_.append((parent, False))
        _accum(self, np.ones((), dtype=np.float64))
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # Operator sugar; scalars and arrays are wrapped automatically.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(as_tensor(other), -1.0))

    def __rsub__(self, other):
        return add(as_tensor(other), mul(self, -1.0))

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _accum(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def _node(data: np.ndarray, parents: tuple, backward) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad or p._parents for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce a broadcast gradient back down to ``shape``."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    data = a.data + b.data

    def backward(g):
        _accum(a, _unbroadcast(g, a.data.shape))
        _accum(b, _unbroadcast(g, b.data.shape))

    return _node(data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    data = a.data * b.data

    def backward(g):
        _accum(a, _unbroadcast(g * b.data, a.data.shape))
        _accum(b, _unbroadcast(g * a.data, b.data.shape))

    return _node(data, (a, b), backward)


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    data = a.data @ b.data
    an, bn = a.data.ndim, b.data.ndim

    def backward(g):
        if an == 2 and bn == 1:
            _accum(a, np.outer(g, b.data))
            _accum(b, a.data.T @ g)
        elif an == 1 and bn == 2:
            _accum(a, b.data @ g)
            _accum(b, np.outer(a.data, g))
        elif an == 2 and bn == 2:
            _accum(a, g @ b.data.T)
            _accum(b, a.data.T @ g)
        elif an == 1 and bn == 1:
            _accum(a, g * b.data)
            _accum(b, g * a.data)
        else:
            raise ValueError(f"unsupported matmul ranks ({an}, {bn})")

    return _node(data, (a, b), backward)


def dot(a, b) -> Tensor:
    """Inner product of two vectors (scalar result)."""
    return matmul(a, b)


def sigmoid(x) -> Tensor:
    x = as_tensor(x)
    # Split by sign to avoid overflow in exp.
    d = x.data
    out = np.where(d >= 0, 1.0 / (1.0 + np.exp(-np.abs(d))), np.exp(-np.abs(d)) / (1.0 + np.exp(-np.abs(d))))

    def backward(g):
        _accum(x, g * out * (1.0 - out))

    return _node(out, (x,), backward)


def tanh(x) -> Tensor:
    x = as_tensor(x)
    out = np.tanh(x.data)

    def backward(g):
        _accum(x, g * (1.0 - out * out))

    return _node(out, (x,), backward)


def relu(x) -> Tensor:
    x = as_tensor(x)
    out = np.maximum(x.data, 0.0)

    def backward(g):
        _accum(x, g * (x.data > 0.0))

    return _node(out, (x,), backward)


def exp(x) -> Tensor:
    x = as_tensor(x)
    out = np.exp(x.data)

    def backward(g):
        _accum(x, g * out)

    return _node(out, (x,), backward)


def log(x) -> Tensor:
    x = as_tensor(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.log(x.data)

    def backward(g):
        _accum(x, g / x.data)

    return _node(out, (x,), backward)


def clamp_min(x, lo: float) -> Tensor:
    """max(x, lo) elementwise; gradient flows only where x > lo."""
    x = as_tensor(x)
    out = np.maximum(x.data, lo)

    def backward(g):
        _accum(x, g * (x.data > lo))

    return _node(out, (x,), backward)


def tsum(x, axis: int | None = None) -> Tensor:
    x = as_tensor(x)
    out = x.data.sum(axis=axis)

    def backward(g):
        if axis is None:
            _accum(x, np.broadcast_to(g, x.data.shape).copy())
        else:
            _accum(x, np.broadcast_to(np.expand_dims(g, axis), x.data.shape).copy())

    return _node(out, (x,), backward)


def softmax(x) -> Tensor:
    """Stable softmax of a vector; shift-invariant, sums to one."""
    x = as_tensor(x)
    if x.data.ndim != 1:
        raise ValueError("softmax expects a vector; use softmax_rows for matrices")
    if x.data.size == 0:
        raise ValueError("empty distribution")
    z = x.data - x.data.max()
    e = np.exp(z)
    out = e / e.sum()

    def backward(g):
        _accum(x, out * (g - float(g @ out)))

    return _node(out, (x,), backward)


def softmax_rows(x) -> Tensor:
    """Row-wise stable softmax of a matrix."""
    x = as_tensor(x)
    if x.data.ndim != 2:
        raise ValueError("softmax_rows expects a matrix")
    if x.data.shape[1] == 0:
        raise ValueError("empty distribution")
    z = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(z)
    out = e / e.sum(axis=1, keepdims=True)

    def backward(g):
        inner = (g * out).sum(axis=1, keepdims=True)
        _accum(x, out * (g - inner))

    return _node(out, (x,), backward)


def logsumexp(x, axis: int | None = None) -> Tensor:
    """Stable log-sum-exp; gradient is the softmax along the reduced axis."""
    x = as_tensor(x)
    if x.data.size == 0:
        raise ValueError("empty distribution")
    m = x.data.max(axis=axis, keepdims=axis is not None)
    if axis is None:
        out = np.log(np.exp(x.data - m).sum()) + m
        weights = np.exp(x.data - out)
    else:
        out = np.log(np.exp(x.data - m).sum(axis=axis, keepdims=True)) + m
        weights = np.exp(x.data - out)
        out = np.squeeze(out, axis=axis)

    def backward(g):
        if axis is None:
            _accum(x, g * weights)
        else:
            _accum(x, np.expand_dims(g, axis) * weights)

    return _node(np.asarray(out), (x,), backward)


def concat(parts) -> Tensor:
    """Concatenate vectors into one vector."""
    parts = [as_tensor(p) for p in parts]
    sizes = [p.data.size for p in parts]
    data = np.concatenate([p.data for p in parts])
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for p, a, b in zip(parts, offsets[:-1], offsets[1:]):
            _accum(p, g[a:b])

    return _node(data, tuple(parts), backward)


def stack(rows_) -> Tensor:
    """Stack equal-length vectors into a matrix (one vector per row)."""
    rows_ = [as_tensor(r) for r in rows_]
    data = np.stack([r.data for r in rows_])

    def backward(g):
        for i, r in enumerate(rows_):
            _accum(r, g[i])

    return _node(data, tuple(rows_), backward)


def row(x, i: int) -> Tensor:
    """Row ``i`` of a matrix (the embedding-lookup op)."""
    x = as_tensor(x)
    data = x.data[i].copy()

    def backward(g):
        if x.grad is None:
            x.grad = np.zeros_like(x.data)
        x.grad[i] += g

    return _node(data, (x,), backward)


def pick(x, i: int) -> Tensor:
    """Scalar element ``i`` of a vector."""
    x = as_tensor(x)
    data = np.asarray(x.data[i])

    def backward(g):
        if x.grad is None:
            x.grad = np.zeros_like(x.data)
        x.grad[i] += g

    return _node(data, (x,), backward)


def narrow(x, start: int, length: int) -> Tensor:
    """Contiguous slice [start, start+length) of a vector."""
    x = as_tensor(x)
    data = x.data[start : start + length].copy()

    def backward(g):
        if x.grad is None:
            x.grad = np.zeros_like(x.data)
        x.grad[start : start + length] += g

    return _node(data, (x,), backward)


def slice2d(x, r0: int, r1: int, c0: int, c1: int) -> Tensor:
    """Rectangular block [r0:r1, c0:c1] of a matrix."""
    x = as_tensor(x)
    data = x.data[r0:r1, c0:c1].copy()

    def backward(g):
        if x.grad is None:
            x.grad = np.zeros_like(x.data)
        x.grad[r0:r1, c0:c1] += g

    return _node(data, (x,), backward)


def gather2d(x, rows_idx, cols_idx) -> Tensor:
    """Vector of x[rows[i], cols[i]] entries."""
    x = as_tensor(x)
    rows_idx = np.asarray(rows_idx, dtype=np.intp)
    cols_idx = np.asarray(cols_idx, dtype=np.intp)
    data = x.data[rows_idx, cols_idx].copy()

    def backward(g):
        if x.grad is None:
            x.grad = np.zeros_like(x.data)
        np.add.at(x.grad, (rows_idx, cols_idx), g)

    return _node(data, (x,), backward)


def scatter_add(base, idx, updates) -> Tensor:
    """base with updates[i] added at position idx[i]; repeats accumulate."""
    base, updates = as_tensor(base), as_tensor(updates)
    idx = np.asarray(idx, dtype=np.intp)
    data = base.data.copy()
    np.add.at(data, idx, updates.data)

    def backward(g):
        _accum(base, g)
        _accum(updates, g[idx])

    return _node(data, (base, updates), backward)


def pad_to(x, length: int) -> Tensor:
    """Zero-extend a vector to ``length``."""
    x = as_tensor(x)
    n = x.data.size
    if length < n:
        raise ValueError("pad_to target shorter than input")
    data = np.zeros(length, dtype=np.float64)
    data[:n] = x.data

    def backward(g):
        _accum(x, g[:n])

    return _node(data, (x,), backward)


def reshape(x, shape: tuple[int, ...]) -> Tensor:
    x = as_tensor(x)
    data = x.data.reshape(shape)

    def backward(g):
        _accum(x, g.reshape(x.data.shape))

    return _node(data, (x,), backward)
