"""Span-overlap precision/recall/F1 under three credit regimes.

Exact credits a span only for an identical counterpart, binary for any
shared token, proportional for the shared fraction. Precision walks the
predicted spans, recall walks the gold spans, and each side matches a
span to the counterpart sharing the most tokens (ties to the earliest
by position). Per-span credits always satisfy exact <= proportional <=
binary, so the aggregates do too.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["OverlapScores", "OverlapReport", "overlap_metrics"]

Span = tuple[int, int, int]  # (sentence_index, token_start, token_end) inclusive


@dataclass
class OverlapScores:
    precision: float
    recall: float

    @property
    def f1(self) -> float:
        if self.precision + self.recall == 0.0:
            return 0.0
        return 2.0 * self.precision * self.recall / (self.precision + self.recall)


@dataclass
class OverlapReport:
    exact: OverlapScores
    binary: OverlapScores
    proportional: OverlapScores
    predicted_count: int
    gold_count: int
    flags: list[str] = field(default_factory=list)

    def summary(self) -> str:
        rows = []
        for name in ("exact", "binary", "proportional"):
            s: OverlapScores = getattr(self, name)
            rows.append(f"{name:>12}  P {s.precision:.4f}  R {s.recall:.4f}  F1 {s.f1:.4f}")
        return "\n".join(rows)


def _as_span(s) -> Span:
    if isinstance(s, tuple):
        return s
    return (s.sentence_index, s.token_start, s.token_end)


def _overlap(a: Span, b: Span) -> int:
    if a[0] != b[0]:
        return 0
    return max(0, min(a[2], b[2]) - max(a[1], b[1]) + 1)


def _length(s: Span) -> int:
    return s[2] - s[1] + 1


def _side_credits(items: list[Span], others: list[Span]) -> tuple[float, float, float]:
    """Summed (exact, binary, proportional) credit of `items` against `others`."""
    exact = binary = prop = 0.0
    for s in items:
        if not others:
            continue
        best = max(others, key=lambda o: (_overlap(s, o), -o[0], -o[1], -o[2]))
        shared = _overlap(s, best)
        if shared:
            binary += 1.0
            prop += shared / _length(s)
        if any(o == s for o in others):
            exact += 1.0
    return exact, binary, prop


def overlap_metrics(predicted: dict[object, list], gold: dict[object, list]) -> OverlapReport:
    """Corpus-level overlap scores; spans are grouped per paragraph key
    and only compared within their own paragraph."""
    flags = []
    n_pred = sum(len(v) for v in predicted.values())
    n_gold = sum(len(v) for v in gold.values())
    if n_pred == 0:
        flags.append("no predicted spans")
    if n_gold == 0:
        flags.append("no gold spans")

    sums = {"exact": [0.0, 0.0], "binary": [0.0, 0.0], "proportional": [0.0, 0.0]}
    for key in set(predicted) | set(gold):
        p_spans = [_as_span(s) for s in predicted.get(key, [])]
        g_spans = [_as_span(s) for s in gold.get(key, [])]
        pe, pb, pp = _side_credits(p_spans, g_spans)
        ge, gb, gp = _side_credits(g_spans, p_spans)
        for name, pc, gc in (("exact", pe, ge), ("binary", pb, gb), ("proportional", pp, gp)):
            sums[name][0] += pc
            sums[name][1] += gc

    def scores(name: str) -> OverlapScores:
        pc, gc = sums[name]
        return OverlapScores(
            precision=pc / n_pred if n_pred else 0.0,
            recall=gc / n_gold if n_gold else 0.0,
        )

    return OverlapReport(
        exact=scores("exact"),
        binary=scores("binary"),
        proportional=scores("proportional"),
        predicted_count=n_pred,
        gold_count=n_gold,
        flags=flags,
    )
