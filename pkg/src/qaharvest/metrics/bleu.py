"""Corpus-level BLEU with clipped n-gram counts, single reference per
candidate. No smoothing by default: a zero match count at any order
zeroes the score. The additive-epsilon flag pads numerator and
denominator of each precision instead, for tiny corpora where empty
high-order counts are routine.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

__all__ = ["BleuReport", "bleu"]


@dataclass
class BleuReport:
    precisions: list[float]
    brevity_penalty: float
    bleu: float
    max_order: int

    def summary(self) -> str:
        parts = " ".join(f"p{i + 1}={p:.4f}" for i, p in enumerate(self.precisions))
        return f"BLEU-{self.max_order} {self.bleu:.4f} (BP {self.brevity_penalty:.4f}, {parts})"


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidates: list[list[str]], references: list[list[str]], max_order: int = 4, smooth_eps: float = 0.0) -> BleuReport:
    if not candidates:
        raise ValueError("empty corpus")
    if len(candidates) != len(references):
        raise ValueError("candidate/reference count mismatch")
    matches = [0] * max_order
    totals = [0] * max_order
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            cgrams = _ngrams(cand, n)
            rgrams = _ngrams(ref, n)
            totals[n - 1] += sum(cgrams.values())
            matches[n - 1] += sum(min(count, rgrams[g]) for g, count in cgrams.items())

    precisions = []
    for m, t in zip(matches, totals):
        if smooth_eps > 0.0 and t > 0:
            precisions.append((m + smooth_eps) / (t + smooth_eps))
        elif t > 0:
            precisions.append(m / t)
        else:
            precisions.append(0.0)

    bp = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len) if cand_len > 0 else 0.0
    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / max_order)
    return BleuReport(precisions, bp, score, max_order)
