"""Answer spans and BIO tagging over tokenized sentences."""

from __future__ import annotations

from dataclasses import dataclass

from .tokens import Paragraph

__all__ = [
    "AnswerSpan",
    "CrossSentenceAnswerError",
    "O_TAG",
    "B_ANS",
    "I_ANS",
    "ANSWER_TAGS",
    "bio_tag_answer",
    "char_to_token_span",
]

O_TAG = "O"
B_ANS = "B_ANS"
I_ANS = "I_ANS"
# index order doubles as the tag-id encoding used by the extractor
ANSWER_TAGS = (O_TAG, B_ANS, I_ANS)


class CrossSentenceAnswerError(ValueError):
    pass


@dataclass(frozen=True)
class AnswerSpan:
    """Token range (inclusive) of an answer within one sentence."""

    sentence_index: int
    token_start: int
    token_end: int
    char_start: int
    char_end: int

    def __post_init__(self):
        if not 0 <= self.token_start <= self.token_end:
            raise ValueError("bad token range")

    def token_range(self) -> tuple[int, int]:
        return (self.token_start, self.token_end)


def bio_tag_answer(sentence_len: int, span: AnswerSpan) -> list[str]:
    """B_ANS at the span start, I_ANS through its end, O elsewhere."""
    if span.token_end >= sentence_len:
        raise ValueError("span exceeds sentence")
    tags = [O_TAG] * sentence_len
    tags[span.token_start] = B_ANS
    for i in range(span.token_start + 1, span.token_end + 1):
        tags[i] = I_ANS
    return tags


def char_to_token_span(paragraph: Paragraph, char_start: int, answer_text: str) -> tuple[AnswerSpan, bool]:
    """Minimal token range covering [char_start, char_start + len(answer_text)).

    Returns the span plus a flag marking whether its boundaries were
    snapped outward to full tokens. The span's char bounds are the
    covering tokens' extent, so they reconstruct the token-aligned
    answer text.
    """
    if not 0 <= char_start < len(paragraph.text):
        raise ValueError("char_start out of bounds")
    char_end = char_start + len(answer_text)
    hits: list[tuple[int, int]] = []
    for s_idx, sentence in enumerate(paragraph.sentences):
        for t_idx, tok in enumerate(sentence):
            if tok.char_end > char_start and tok.char_start < char_end:
                hits.append((s_idx, t_idx))
    if not hits:
        raise ValueError("answer overlaps no token")
    sentence_indices = {s for s, _ in hits}
    if len(sentence_indices) > 1:
        raise CrossSentenceAnswerError("cross-sentence answer")
    s_idx = sentence_indices.pop()
    first = min(t for _, t in hits)
    last = max(t for _, t in hits)
    sentence = paragraph.sentences[s_idx]
    span = AnswerSpan(s_idx, first, last, sentence[first].char_start, sentence[last].char_end)
    snapped = span.char_start != char_start or span.char_end != char_end
    return span, snapped
