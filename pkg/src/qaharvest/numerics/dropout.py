"""Inverted dropout: kept units are scaled by 1/(1-p) at training time
so inference needs no rescaling."""

from __future__ import annotations

import numpy as np

from .rng import RngState
from .tensor import Tensor, mul

__all__ = ["dropout_mask", "apply_dropout"]


def dropout_mask(rng: RngState, shape: tuple[int, ...], p: float) -> np.ndarray:
    """Mask of 0s and 1/(1-p)s; a unit is kept with probability 1-p.

    p = 0 returns all ones without consuming any randomness, so a
    dropout-free configuration draws the same RNG sequence as code that
    never calls this at all.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("dropout probability must be in [0, 1)")
    if p == 0.0:
        return np.ones(shape, dtype=np.float64)
    draws = rng.uniform(0.0, 1.0, shape)
    return np.where(draws >= p, 1.0 / (1.0 - p), 0.0)


def apply_dropout(x: Tensor, rng: RngState | None, p: float, train: bool) -> Tensor:
    """Identity at inference or p = 0; otherwise multiply by a fresh mask."""
    if not train or p == 0.0:
        return x
    if rng is None:
        raise ValueError("training-mode dropout needs an rng")
    return mul(x, Tensor(dropout_mask(rng, x.data.shape, p)))
