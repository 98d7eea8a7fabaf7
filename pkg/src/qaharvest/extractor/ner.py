"""Coarse named-entity features for the extractor.

The tag inventory is fixed at {O, PER, LOC, ORG, NUM, DATE}; any tagger
mapping a paragraph to one tag per token (flattened sentence order) can
feed the extractor. The bundled stand-in is rule based so the pipeline
runs with no external models:

* an all-digit token is DATE when it reads as a year (1000..2100),
  otherwise NUM;
* a month name is DATE;
* an alphabetic token capitalized in the original text is PER, the
  collapsed stand-in for all proper-noun tags (pronouns excluded, even
  sentence-initial ones);
* everything else is O.
"""

from __future__ import annotations

from typing import Callable

from ..coref.mentions import PRONOUNS
from ..corpus.tokens import Paragraph

__all__ = ["NER_TAGS", "NerTagger", "rule_ner_tags"]

NER_TAGS = ("O", "PER", "LOC", "ORG", "NUM", "DATE")

# one tag per token, over the paragraph's sentences flattened in order
NerTagger = Callable[[Paragraph], list[str]]

_MONTHS = frozenset(
    """january february march april may june july august september
       october november december""".split()
)


def rule_ner_tags(paragraph: Paragraph) -> list[str]:
    tags: list[str] = []
    for sentence in paragraph.sentences:
        for tok in sentence:
            if tok.surface.isdigit():
                year = len(tok.surface) == 4 and 1000 <= int(tok.surface) <= 2100
                tags.append("DATE" if year else "NUM")
            elif tok.surface in _MONTHS:
                tags.append("DATE")
            elif (
                tok.surface.isalpha()
                and tok.surface not in PRONOUNS
                and paragraph.text[tok.char_start].isupper()
            ):
                tags.append("PER")
            else:
                tags.append("O")
    return tags
