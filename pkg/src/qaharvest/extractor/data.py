"""Paragraph-level sequences for the extractor.

The tagger runs over a paragraph's tokens flattened across sentences;
answer spans from the corpus are sentence-local. This module holds the
two index conversions plus gold BIO construction. Gold spans that would
overlap an already-placed span are skipped (BIO cannot express nesting)
and counted, longest-first at each start so the most informative span
wins.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.tagging import ANSWER_TAGS, AnswerSpan, B_ANS, I_ANS, O_TAG
from ..corpus.tokens import Paragraph, Token
from .ner import NerTagger, rule_ner_tags

__all__ = [
    "flatten_tokens",
    "sentence_bounds",
    "flat_span_to_answer",
    "paragraph_bio",
    "ExtractorExample",
    "make_extractor_example",
]


def flatten_tokens(paragraph: Paragraph) -> list[Token]:
    return [tok for sentence in paragraph.sentences for tok in sentence]


def sentence_bounds(paragraph: Paragraph) -> list[tuple[int, int]]:
    """Half-open [start, end) flat-index range of each sentence."""
    bounds = []
    at = 0
    for sentence in paragraph.sentences:
        bounds.append((at, at + len(sentence)))
        at += len(sentence)
    return bounds


def flat_span_to_answer(paragraph: Paragraph, flat_start: int, flat_end: int) -> AnswerSpan | None:
    """Sentence-local span for an inclusive flat range, or None if the
    range crosses a sentence boundary."""
    for s_idx, (lo, hi) in enumerate(sentence_bounds(paragraph)):
        if lo <= flat_start < hi:
            if flat_end >= hi:
                return None
            sentence = paragraph.sentences[s_idx]
            a, b = flat_start - lo, flat_end - lo
            return AnswerSpan(s_idx, a, b, sentence[a].char_start, sentence[b].char_end)
    raise IndexError("flat index out of range")


def paragraph_bio(paragraph: Paragraph, spans: list[AnswerSpan]) -> tuple[list[str], int]:
    """Flat gold BIO tags for a paragraph plus the overlap-skip count."""
    bounds = sentence_bounds(paragraph)
    n = bounds[-1][1] if bounds else 0
    flat = []
    for span in spans:
        lo = bounds[span.sentence_index][0]
        flat.append((lo + span.token_start, lo + span.token_end))
    tags = [O_TAG] * n
    skipped = 0
    for start, end in sorted(flat, key=lambda p: (p[0], p[0] - p[1])):
        if any(tags[i] != O_TAG for i in range(start, end + 1)):
            skipped += 1
            continue
        tags[start] = B_ANS
        for i in range(start + 1, end + 1):
            tags[i] = I_ANS
    return tags, skipped


@dataclass
class ExtractorExample:
    """One training/eval unit: a paragraph with aligned flat sequences."""

    paragraph: Paragraph
    gold_spans: list[AnswerSpan]
    tags: list[str]
    ner_tags: list[str]
    skipped_overlaps: int

    def __post_init__(self):
        n = len(flatten_tokens(self.paragraph))
        if len(self.tags) != n or len(self.ner_tags) != n:
            raise ValueError("sequences do not align with paragraph tokens")
        if any(t not in ANSWER_TAGS for t in self.tags):
            raise ValueError("unknown answer tag")

    def surfaces(self) -> list[str]:
        return [t.surface for t in flatten_tokens(self.paragraph)]


def make_extractor_example(
    paragraph: Paragraph,
    gold_spans: list[AnswerSpan],
    ner_tagger: NerTagger = rule_ner_tags,
) -> ExtractorExample:
    tags, skipped = paragraph_bio(paragraph, gold_spans)
    return ExtractorExample(paragraph, list(gold_spans), tags, ner_tagger(paragraph), skipped)
