"""Answer-span extraction: BiLSTM-CRF tagging over paragraphs."""

from .config import ExtractorConfig
from .crf import DecodedSpans, crf_log_partition, crf_nll, crf_score, decode_spans, viterbi
from .data import (
    ExtractorExample,
    flat_span_to_answer,
    flatten_tokens,
    make_extractor_example,
    paragraph_bio,
    sentence_bounds,
)
from .model import ExtractionResult, ExtractorModel
from .ner import NER_TAGS, NerTagger, rule_ner_tags
from .train import ExtractorLogEntry, ExtractorTrainReport, dev_exact_f1, train_extractor

__all__ = [
    "ExtractorConfig",
    "DecodedSpans",
    "crf_log_partition",
    "crf_nll",
    "crf_score",
    "decode_spans",
    "viterbi",
    "ExtractorExample",
    "flat_span_to_answer",
    "flatten_tokens",
    "make_extractor_example",
    "paragraph_bio",
    "sentence_bounds",
    "ExtractionResult",
    "ExtractorModel",
    "NER_TAGS",
    "NerTagger",
    "rule_ner_tags",
    "ExtractorLogEntry",
    "ExtractorTrainReport",
    "dev_exact_f1",
    "train_extractor",
]
