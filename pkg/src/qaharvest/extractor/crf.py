"""Linear-chain CRF: log-space forward algorithm, Viterbi, BIO span parsing.

Conventions for a tag set of size k: emission matrix P is n x k, the
transition matrix A is (k+2) x (k+2) with two virtual tags appended,
START = k and STOP = k+1. A path y_1..y_n scores

    q = sum_t P[t, y_t] + A[START, y_1] + sum_t A[y_t, y_{t+1}] + A[y_n, STOP]

and the training loss is -q(gold) + log Z with Z summed over all k^n
paths by the forward recursion. Emissions may be raw scores or
probability rows; nothing here assumes either.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..corpus.tagging import ANSWER_TAGS, B_ANS, I_ANS, O_TAG
from ..numerics import Tensor, add, gather2d, logsumexp, mul, narrow, reshape, row, slice2d, tsum
from ..numerics.tensor import as_tensor

__all__ = [
    "crf_score",
    "crf_log_partition",
    "crf_nll",
    "viterbi",
    "DecodedSpans",
    "decode_spans",
]


def _check_shapes(P, A) -> tuple[int, int]:
    n, k = P.data.shape
    if A.data.shape != (k + 2, k + 2):
        raise ValueError(f"transition matrix {A.data.shape} does not fit k={k} tags")
    return n, k


def crf_score(P: Tensor, A: Tensor, tags: Sequence[int]) -> Tensor:
    """Path score q of one tag sequence, boundary transitions included."""
    P, A = as_tensor(P), as_tensor(A)
    n, k = _check_shapes(P, A)
    if len(tags) != n:
        raise ValueError("tag sequence length does not match emissions")
    if n == 0:
        raise ValueError("empty sequence")
    tags = list(tags)
    if any(not 0 <= t < k for t in tags):
        raise ValueError("tag id out of range")
    start, stop = k, k + 1
    emit = tsum(gather2d(P, np.arange(n), tags))
    trans = tsum(gather2d(A, [start] + tags, tags + [stop]))
    return add(emit, trans)


def crf_log_partition(P: Tensor, A: Tensor) -> Tensor:
    """log Z by the forward recursion, stable in log space."""
    P, A = as_tensor(P), as_tensor(A)
    n, k = _check_shapes(P, A)
    if n == 0:
        raise ValueError("empty sequence")
    start, stop = k, k + 1
    inner = slice2d(A, 0, k, 0, k)
    from_start = narrow(row(A, start), 0, k)
    to_stop = reshape(slice2d(A, 0, k, stop, stop + 1), (k,))
    alpha = add(row(P, 0), from_start)
    for t in range(1, n):
        # lattice[i, j] = alpha[i] + A[i, j], reduced over the source tag i
        lattice = add(reshape(alpha, (k, 1)), inner)
        alpha = add(logsumexp(lattice, axis=0), row(P, t))
    return logsumexp(add(alpha, to_stop))


def crf_nll(P: Tensor, A: Tensor, tags: Sequence[int]) -> Tensor:
    """-log p(tags | P, A); nonnegative, differentiable through P and A."""
    return add(crf_log_partition(P, A), mul(crf_score(P, A, tags), -1.0))


def viterbi(P, A) -> tuple[list[int], float]:
    """Highest-scoring tag sequence and its score.

    Backpointer ties go to the lowest tag index. An empty input decodes
    to the empty sequence, scoring just the START->STOP transition.
    """
    P = P.data if isinstance(P, Tensor) else np.asarray(P, dtype=np.float64)
    A = A.data if isinstance(A, Tensor) else np.asarray(A, dtype=np.float64)
    n, k = P.shape
    if A.shape != (k + 2, k + 2):
        raise ValueError(f"transition matrix {A.shape} does not fit k={k} tags")
    start, stop = k, k + 1
    if n == 0:
        return [], float(A[start, stop])
    delta = P[0] + A[start, :k]
    backptr = np.zeros((n, k), dtype=np.intp)
    for t in range(1, n):
        scores = delta[:, None] + A[:k, :k]
        backptr[t] = scores.argmax(axis=0)  # first max = lowest tag index
        delta = scores.max(axis=0) + P[t]
    final = delta + A[:k, stop]
    best = int(final.argmax())
    path = [best]
    for t in range(n - 1, 0, -1):
        best = int(backptr[t, best])
        path.append(best)
    path.reverse()
    return path, float(final.max())


@dataclass(frozen=True)
class DecodedSpans:
    """Inclusive token ranges parsed from a BIO sequence."""

    spans: tuple[tuple[int, int], ...]
    repaired: bool


def decode_spans(tags: Sequence[str]) -> DecodedSpans:
    """Parse B/I runs into spans; a bare I (nothing open) opens one.

    The repair choice trades precision for recall: a malformed run still
    yields a candidate answer instead of being dropped.
    """
    for t in tags:
        if t not in ANSWER_TAGS:
            raise ValueError(f"unknown tag {t!r}")
    spans: list[tuple[int, int]] = []
    repaired = False
    open_start: int | None = None
    for i, t in enumerate(tags):
        if t == B_ANS:
            if open_start is not None:
                spans.append((open_start, i - 1))
            open_start = i
        elif t == I_ANS:
            if open_start is None:
                open_start = i
                repaired = True
        elif t == O_TAG and open_start is not None:
            spans.append((open_start, i - 1))
            open_start = None
    if open_start is not None:
        spans.append((open_start, len(tags) - 1))
    return DecodedSpans(tuple(spans), repaired)
