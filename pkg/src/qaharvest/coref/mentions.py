"""Mention detection over tokenized paragraphs.

Three mention kinds, found per sentence in this order:

* pronominal: a single token whose surface is in the closed pronoun
  list, whatever its capitalization;
* proper: a maximal run of alphabetic tokens that are capitalized in
  the original text (sentence-initial capitals count; pronouns break a
  run);
* nominal: a determiner (the/a/an) followed by one or two alphabetic
  tokens that are lowercase in the original and not pronouns.

The stand-in detector exists so the pipeline runs offline; a real
mention detector can feed the same Mention shape through the resolver
interface.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.tokens import Paragraph

__all__ = ["Mention", "PRONOUNS", "find_mentions"]

PRONOUNS = frozenset(
    """he him his himself she her hers herself it its itself
       they them their theirs themselves""".split()
)

_DETERMINERS = frozenset({"the", "a", "an"})

PRONOMINAL = "pronominal"
PROPER = "proper"
NOMINAL = "nominal"


@dataclass(frozen=True)
class Mention:
    """Token span (inclusive) of one mention within one sentence."""

    sentence_index: int
    token_start: int
    token_end: int
    kind: str

    def __post_init__(self):
        if self.token_start > self.token_end:
            raise ValueError("bad mention span")
        if self.kind == PRONOMINAL and self.token_start != self.token_end:
            raise ValueError("pronominal mentions are single tokens")

    def position(self) -> tuple[int, int]:
        return (self.sentence_index, self.token_start)

    def span_tokens(self, sentences: list[list[str]]) -> list[str]:
        return sentences[self.sentence_index][self.token_start : self.token_end + 1]

    def surface(self, sentences: list[list[str]]) -> str:
        return " ".join(self.span_tokens(sentences))


def find_mentions(paragraph: Paragraph) -> list[Mention]:
    """All mentions in the paragraph, in (sentence, start) order."""
    out: list[Mention] = []
    for s_idx, sentence in enumerate(paragraph.sentences):
        is_pron = [t.surface in PRONOUNS for t in sentence]
        is_alpha = [t.surface.isalpha() for t in sentence]
        is_cap = [is_alpha[i] and paragraph.text[t.char_start].isupper() for i, t in enumerate(sentence)]

        for i, pron in enumerate(is_pron):
            if pron:
                out.append(Mention(s_idx, i, i, PRONOMINAL))

        in_proper = [False] * len(sentence)
        i = 0
        while i < len(sentence):
            if is_cap[i] and not is_pron[i]:
                j = i
                while j + 1 < len(sentence) and is_cap[j + 1] and not is_pron[j + 1]:
                    j += 1
                out.append(Mention(s_idx, i, j, PROPER))
                for k in range(i, j + 1):
                    in_proper[k] = True
                i = j + 1
            else:
                i += 1

        for i, tok in enumerate(sentence):
            if tok.surface not in _DETERMINERS or in_proper[i]:
                continue
            j = i
            while (
                j + 1 < len(sentence)
                and j + 1 - i <= 2
                and is_alpha[j + 1]
                and not is_cap[j + 1]
                and not is_pron[j + 1]
                and not in_proper[j + 1]
            ):
                j += 1
            if j > i:
                out.append(Mention(s_idx, i, j, NOMINAL))

    out.sort(key=lambda m: (m.sentence_index, m.token_start, m.token_end))
    return out
