"""Two-step question-answer pair harvesting from raw text: a BiLSTM-CRF
answer-span extractor followed by a coreference-aware neural question
generator with attention and copying."""

__version__ = "0.1.0"
