"""Question-type histogram by leading-token patterns, longest match
first ("what percentage" classifies before any shorter "what ..."
pattern could)."""

from __future__ import annotations

from collections import Counter

__all__ = ["QUESTION_TYPES", "classify_question", "question_type_distribution"]

# token prefixes, checked longest-first; everything else is "other"
QUESTION_TYPES = (
    ("in", "what"),
    ("how", "long"),
    ("what", "does"),
    ("what", "do"),
    ("what", "is"),
    ("what", "was"),
    ("what", "percentage"),
    ("what", "did"),
    ("when",),
    ("who",),
    ("where",),
    ("why",),
    ("which",),
)

_ORDERED = sorted(QUESTION_TYPES, key=len, reverse=True)


def classify_question(tokens: list[str]) -> str:
    for pattern in _ORDERED:
        if tuple(tokens[: len(pattern)]) == pattern:
            return " ".join(pattern)
    return "other"


def question_type_distribution(questions: list[list[str]]) -> Counter:
    return Counter(classify_question(q) for q in questions)
