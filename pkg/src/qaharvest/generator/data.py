"""Input record and dynamic vocabulary for the question generator."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus.vocab import UNK_ID, Vocabulary

__all__ = ["GeneratorExample", "DynamicVocab"]


@dataclass
class GeneratorExample:
    """One coreference-transformed sentence with aligned features and
    its gold question. All four per-token lists share one length. The
    question is empty for generation-time inputs, where it is the
    model's job to produce one."""

    tokens: list[str]
    coref_tags: list[str]
    scores: list[float]
    answer_tags: list[str]
    question: list[str]

    def __post_init__(self):
        n = len(self.tokens)
        if not n:
            raise ValueError("empty source sentence")
        if not (len(self.coref_tags) == len(self.scores) == len(self.answer_tags) == n):
            raise ValueError("feature lists misaligned with tokens")


class DynamicVocab:
    """Target vocabulary extended with this source sentence's off-vocab
    surfaces, so copied words are first-class prediction targets.

    Ids below len(base) are base-vocabulary ids; extension ids follow in
    order of first appearance in the source. copy_ids[i] is the dynamic
    id of source position i, the index the copy distribution scatters
    attention mass into.
    """

    def __init__(self, base: Vocabulary, source_tokens: list[str]):
        self.base = base
        self.source_tokens = list(source_tokens)
        self._ext: dict[str, int] = {}
        for tok in source_tokens:
            if tok not in base and tok not in self._ext:
                self._ext[tok] = len(base) + len(self._ext)
        self._ext_list = [None] * len(self._ext)
        for tok, idx in self._ext.items():
            self._ext_list[idx - len(base)] = tok
        self.copy_ids = [base.id_of(t) if t in base else self._ext[t] for t in source_tokens]

    @property
    def size(self) -> int:
        return len(self.base) + len(self._ext)

    def id_of(self, token: str) -> int:
        if token in self.base:
            return self.base.id_of(token)
        return self._ext.get(token, UNK_ID)

    def token_of(self, idx: int) -> str:
        if idx < len(self.base):
            return self.base.token_of(idx)
        return self._ext_list[idx - len(self.base)]
