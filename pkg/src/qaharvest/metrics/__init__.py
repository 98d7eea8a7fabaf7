"""Evaluation: corpus BLEU, span-overlap precision/recall/F1 under
exact/binary/proportional credit, and question-type distributions.
METEOR is deliberately not implemented; reports say so instead of
printing a lookalike number."""

from .bleu import BleuReport, bleu
from .overlap import OverlapReport, OverlapScores, overlap_metrics
from .qtypes import QUESTION_TYPES, classify_question, question_type_distribution

__all__ = [
    "BleuReport",
    "bleu",
    "OverlapReport",
    "OverlapScores",
    "overlap_metrics",
    "QUESTION_TYPES",
    "classify_question",
    "question_type_distribution",
]
