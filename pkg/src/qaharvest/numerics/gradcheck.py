"""Finite-difference validation of analytic gradients.

Central differences at float64: for each coordinate of each parameter,
perturb by +/-eps, recompute the loss, and compare the slope against the
gradient produced by backward(). The relative-error denominator is
max(1, |analytic|, |numeric|) so tiny gradients do not blow up the
ratio.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from .params import Parameter

__all__ = ["grad_check"]


def grad_check(loss_fn: Callable[[], object], params: Iterable[Parameter], eps: float = 1e-5) -> float:
    """Max relative error between analytic and numeric gradients.

    loss_fn must be deterministic: it is called repeatedly while
    parameter values are perturbed in place. It returns the scalar loss
    tensor; backward() is driven from here.
    """
    if not 1e-6 <= eps <= 1e-3:
        raise ValueError("eps must lie in [1e-6, 1e-3]")
    params = list(params)
    for p in params:
        p.grad = None
    loss = loss_fn()
    if not math.isfinite(float(loss.data)):
        raise ValueError("loss is not finite")
    loss.backward()
    analytic = {p.name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data)) for p in params}

    worst = 0.0
    for p in params:
        flat = p.data.reshape(-1)
        grad_flat = analytic[p.name].reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + eps
            up = float(loss_fn().data)
            flat[i] = keep - eps
            down = float(loss_fn().data)
            flat[i] = keep
            if not (math.isfinite(up) and math.isfinite(down)):
                raise ValueError("loss is not finite during perturbation")
            numeric = (up - down) / (2.0 * eps)
            a = grad_flat[i]
            err = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
            if err > worst:
                worst = err
    return worst
