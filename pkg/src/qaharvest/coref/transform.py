"""The coreference transformation: append each pronoun's representative
antecedent right after the pronoun and tag both spans.

Coref tags: B_PRO/I_PRO on pronoun tokens, B_ANT/I_ANT on appended
antecedent copies, O elsewhere. Mention-pair scores land only on
antecedent tokens; everything else scores zero. The origin map records,
for every output token, the original token index it came from (None for
appended copies), which is how answer BIO tags survive the rewrite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mentions import PRONOMINAL, Mention
from .resolve import CorefCluster, NoAntecedentError, select_representative

__all__ = ["COREF_TAGS", "TransformedSentence", "transform"]

# index order doubles as the tag-id encoding used by the generator
COREF_TAGS = ("O", "B_PRO", "I_PRO", "B_ANT", "I_ANT")


@dataclass
class TransformedSentence:
    tokens: list[str]
    coref_tags: list[str]
    scores: list[float]
    origin: list[int | None]

    def strip_appended(self) -> list[str]:
        """The original sentence, recovered through the origin map."""
        return [t for t, o in zip(self.tokens, self.origin) if o is not None]

    def project_answer_tags(self, original_tags: list[str]) -> list[str]:
        """Re-index answer BIO tags; appended copies are never answers."""
        return [original_tags[o] if o is not None else "O" for o in self.origin]


def transform(sentences: list[list[str]], sentence_index: int, clusters: list[CorefCluster]) -> TransformedSentence:
    """Rewrite one sentence using clusters resolved over it and its context.

    Pronouns belonging to clusters with no non-pronominal mention are
    left untouched, as are pronouns in no cluster at all.
    """
    sentence = sentences[sentence_index]
    expansions: dict[int, tuple[Mention, list[str], float]] = {}
    claimed: set[int] = set()
    for cluster in clusters:
        try:
            rep = select_representative(cluster)
        except NoAntecedentError:
            continue
        rep_tokens = rep.span_tokens(sentences)
        for pron in cluster.pronouns():
            if pron.sentence_index != sentence_index:
                continue
            span = set(range(pron.token_start, pron.token_end + 1))
            if span & claimed:
                raise ValueError("overlapping pronoun spans")
            claimed |= span
            score = cluster.pronoun_scores.get(pron, 0.0)
            expansions[pron.token_start] = (pron, rep_tokens, score)

    tokens: list[str] = []
    tags: list[str] = []
    scores: list[float] = []
    origin: list[int | None] = []
    i = 0
    while i < len(sentence):
        if i in expansions:
            pron, rep_tokens, score = expansions[i]
            for k in range(pron.token_start, pron.token_end + 1):
                tokens.append(sentence[k])
                tags.append("B_PRO" if k == pron.token_start else "I_PRO")
                scores.append(0.0)
                origin.append(k)
            for j, rt in enumerate(rep_tokens):
                tokens.append(rt)
                tags.append("B_ANT" if j == 0 else "I_ANT")
                scores.append(score)
                origin.append(None)
            i = pron.token_end + 1
        else:
            tokens.append(sentence[i])
            tags.append("O")
            scores.append(0.0)
            origin.append(i)
            i += 1
    return TransformedSentence(tokens, tags, scores, origin)
