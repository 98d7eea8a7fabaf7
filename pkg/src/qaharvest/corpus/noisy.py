"""Training-set augmentation from extractor output.

A predicted span that shares at least one token with a gold answer span
in the same sentence becomes a new training example carrying that gold
span's question. Predicted spans identical to a gold span are not
re-added. On full SQuAD the added examples come out near 42% of the
final training set; the fraction is reported, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .squad import QAExample
from .tagging import AnswerSpan, bio_tag_answer

__all__ = ["NoisyReport", "make_noisy_training_set"]


@dataclass
class NoisyReport:
    gold_count: int
    added: int

    @property
    def total(self) -> int:
        return self.gold_count + self.added

    @property
    def noisy_fraction(self) -> float:
        return self.added / self.total if self.total else 0.0

    def summary(self) -> str:
        return f"added {self.added} noisy examples to {self.gold_count} gold ({self.noisy_fraction:.2%} of the final set)"


def _overlap(a: AnswerSpan, b: AnswerSpan) -> int:
    if a.sentence_index != b.sentence_index:
        return 0
    lo = max(a.token_start, b.token_start)
    hi = min(a.token_end, b.token_end)
    return max(0, hi - lo + 1)


def make_noisy_training_set(
    gold: list[QAExample],
    predicted: dict[tuple[str, int], list[AnswerSpan]],
) -> tuple[list[QAExample], NoisyReport]:
    """Gold examples plus one example per overlapping predicted span.

    Ambiguous overlaps pair with the gold span sharing the most tokens;
    remaining ties go to the earliest gold span in the paragraph.
    """
    by_paragraph: dict[tuple[str, int], list[QAExample]] = {}
    for ex in gold:
        by_paragraph.setdefault(ex.paragraph.key(), []).append(ex)

    out = list(gold)
    added = 0
    for key, spans in sorted(predicted.items()):
        candidates = by_paragraph.get(key, [])
        if not candidates:
            continue
        gold_ranges = {(ex.answer.sentence_index, ex.answer.token_start, ex.answer.token_end) for ex in candidates}
        seen: set[tuple[int, int, int]] = set()
        for span in spans:
            ident = (span.sentence_index, span.token_start, span.token_end)
            if ident in seen or ident in gold_ranges:
                continue
            seen.add(ident)
            best = max(
                candidates,
                key=lambda ex: (
                    _overlap(span, ex.answer),
                    -ex.answer.sentence_index,
                    -ex.answer.token_start,
                    -ex.answer.token_end,
                ),
            )
            if _overlap(span, best.answer) == 0:
                continue
            sentence_len = len(best.paragraph.sentences[span.sentence_index])
            out.append(
                QAExample(
                    paragraph=best.paragraph,
                    answer=span,
                    gold_question=list(best.gold_question),
                    answer_bio=bio_tag_answer(sentence_len, span),
                    noisy=True,
                )
            )
            added += 1
    return out, NoisyReport(gold_count=len(gold), added=added)
