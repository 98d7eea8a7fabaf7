"""The coreference-aware question generator.

Encoder side: every source token is embedded as the concatenation of a
gated coreference feature, an answer-position feature, and its word
embedding, then read by a bidirectional LSTM. Decoder side: an LSTM
attends over the encoder states using the PREVIOUS decoder state as the
attention query, mixes a vocabulary softmax with a copy distribution
formed by summing attention mass per source surface, and predicts over
the dynamic vocabulary (target vocabulary plus source surfaces).

Shape conventions, with W = word_dim, H = hidden_dim, F = feature dims:
encoder input is (F_coref + F_ans + W,), encoder states are (H,) per
direction, token vectors h_i and the decoder state are (2H,), and the
output projection maps (4H,) -> vocabulary logits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..coref.transform import COREF_TAGS
from ..corpus.tagging import ANSWER_TAGS
from ..corpus.vocab import EOS_ID, SOS_ID, UNK_ID, Vocabulary
from ..numerics import (
    LstmCellParams,
    ParameterStore,
    RngState,
    Tensor,
    apply_dropout,
    clamp_min,
    concat,
    dot,
    log,
    lstm_step,
    matmul,
    pad_to,
    pick,
    relu,
    row,
    scatter_add,
    sigmoid,
    softmax,
    stack,
    tsum,
)
from .config import GeneratorConfig
from .data import DynamicVocab, GeneratorExample

__all__ = ["QGModel", "EncoderOutput", "DecodeStep", "gate_coref_features"]

logger = logging.getLogger("qaharvest.generator")

_COREF_TAG_ID = {t: i for i, t in enumerate(COREF_TAGS)}
_ANSWER_TAG_ID = {t: i for i, t in enumerate(ANSWER_TAGS)}


@dataclass
class EncoderOutput:
    """Per-token encoder states (n x 2H) plus the final directional
    states used to seed the decoder, and the tokens they encode."""

    hidden: Tensor
    fwd_final: tuple[Tensor, Tensor]
    bwd_final: tuple[Tensor, Tensor]
    source_tokens: list[str]


@dataclass
class DecodeStep:
    dist: Tensor  # P over the dynamic vocabulary
    copy_gate: Tensor  # scalar in (0, 1)
    state: tuple[Tensor, Tensor]
    attention: Tensor  # alpha over source positions


def gate_coref_features(
    coref_emb: Tensor,
    score: float,
    feature_weight: Tensor,
    score_weight: Tensor,
    bias: Tensor,
    use_gating: bool = True,
    use_score: bool = True,
) -> Tensor:
    """Multiplicative refinement of the coreference feature embedding.

    gate = ReLU(feature_weight @ c + score_weight * score + bias),
    output = gate * c elementwise. With gating off the embedding passes
    through untouched; with scores off the score path contributes an
    exact zero vector.
    """
    if not use_gating:
        return coref_emb
    effective = score if use_score else 0.0
    pre = matmul(feature_weight, coref_emb) + score_weight * float(effective) + bias
    return relu(pre) * coref_emb


class QGModel:
    def __init__(self, config: GeneratorConfig, vocab: Vocabulary, rng: RngState):
        self.config = config
        self.vocab = vocab
        store = ParameterStore()
        s = config.init_scale
        self.store = store
        self.word_emb = store.create("word_emb", (len(vocab), config.word_dim), rng, s)
        self.answer_emb = store.create("answer_tag_emb", (len(ANSWER_TAGS), config.answer_feat_dim), rng, s)
        self.coref_emb = store.create("coref_tag_emb", (len(COREF_TAGS), config.coref_feat_dim), rng, s)
        f = config.coref_feat_dim
        self.gate_feature_weight = store.create("gate.feature_weight", (f, f), rng, s)
        self.gate_score_weight = store.create("gate.score_weight", (f,), rng, s)
        self.gate_bias = store.create("gate.bias", (f,), rng, s)
        enc_in = f + config.answer_feat_dim + config.word_dim
        h = config.hidden_dim
        self.enc_fwd = LstmCellParams(store, "enc_fwd", enc_in, h, rng)
        self.enc_bwd = LstmCellParams(store, "enc_bwd", enc_in, h, rng)
        self.dec = LstmCellParams(store, "dec", config.word_dim, 2 * h, rng)
        self.attn_weight = store.create("attn.bilinear", (2 * h, 2 * h), rng, s)
        self.out_proj = store.create("out.proj", (len(vocab), 4 * h), rng, s)
        self.copy_context_weight = store.create("copy.context_weight", (2 * h,), rng, s)
        self.copy_state_weight = store.create("copy.state_weight", (2 * h,), rng, s)

    # ------------------------------------------------------------ encoder

    def embed_inputs(self, ex: GeneratorExample, train: bool = False, rng: RngState | None = None) -> list[Tensor]:
        """Per-token encoder inputs concat(gated coref, answer, word)."""
        inputs = []
        for tok, ctag, score, atag in zip(ex.tokens, ex.coref_tags, ex.scores, ex.answer_tags):
            c = row(self.coref_emb, _COREF_TAG_ID[ctag])
            d = gate_coref_features(
                c,
                score,
                self.gate_feature_weight,
                self.gate_score_weight,
                self.gate_bias,
                use_gating=self.config.use_gating,
                use_score=self.config.use_mention_scores,
            )
            a = row(self.answer_emb, _ANSWER_TAG_ID[atag])
            x = row(self.word_emb, self.vocab.id_of(tok))
            x = apply_dropout(x, rng, self.config.dropout, train)
            inputs.append(concat([d, a, x]))
        return inputs

    def encode(self, inputs: list[Tensor], source_tokens: list[str], train: bool = False, rng: RngState | None = None) -> EncoderOutput:
        if not inputs:
            raise ValueError("empty sequence")
        h_dim = self.config.hidden_dim
        zeros = lambda: Tensor(np.zeros(h_dim))
        fh, fc = zeros(), zeros()
        fwd = []
        for e in inputs:
            fh, fc = lstm_step(e, fh, fc, self.enc_fwd)
            fwd.append(fh)
        bh, bc = zeros(), zeros()
        bwd: list[Tensor] = [None] * len(inputs)
        for i in reversed(range(len(inputs))):
            bh, bc = lstm_step(inputs[i], bh, bc, self.enc_bwd)
            bwd[i] = bh
        rows = [concat([f, b]) for f, b in zip(fwd, bwd)]
        rows = [apply_dropout(r, rng, self.config.dropout, train) for r in rows]
        return EncoderOutput(stack(rows), (fwd[-1], fc), (bwd[0], bc), list(source_tokens))

    def initial_state(self, enc: EncoderOutput) -> tuple[Tensor, Tensor]:
        """Decoder starts from the concatenated final directional states."""
        return (
            concat([enc.fwd_final[0], enc.bwd_final[0]]),
            concat([enc.fwd_final[1], enc.bwd_final[1]]),
        )

    # ------------------------------------------------------------ decoder

    def prev_embedding(self, dynamic_id: int, train: bool = False, rng: RngState | None = None) -> Tensor:
        """Word embedding of the previously emitted token; copied
        off-vocabulary tokens have no row of their own and fall back to
        the unknown-word embedding."""
        base_id = dynamic_id if dynamic_id < len(self.vocab) else UNK_ID
        x = row(self.word_emb, base_id)
        return apply_dropout(x, rng, self.config.dropout, train)

    def decode_step(
        self,
        prev_emb: Tensor,
        state: tuple[Tensor, Tensor],
        enc: EncoderOutput,
        dyn: DynamicVocab,
        train: bool = False,
        rng: RngState | None = None,
    ) -> DecodeStep:
        h_prev, c_prev = state
        s_h, s_c = lstm_step(prev_emb, h_prev, c_prev, self.dec)
        # attention scores use the previous decoder state as the query
        scores = matmul(enc.hidden, matmul(self.attn_weight, h_prev))
        alpha = softmax(scores)
        context = matmul(alpha, enc.hidden)
        out_h = apply_dropout(s_h, rng, self.config.dropout, train)
        p_vocab = softmax(matmul(self.out_proj, concat([context, out_h])))
        lam = sigmoid(dot(self.copy_context_weight, context) + dot(self.copy_state_weight, out_h))
        p_copy = scatter_add(Tensor(np.zeros(dyn.size)), dyn.copy_ids, alpha)
        dist = lam * p_copy + (1.0 - lam) * pad_to(p_vocab, dyn.size)
        return DecodeStep(dist, lam, (s_h, s_c), alpha)

    # ----------------------------------------------------- loss / metrics

    def nll(self, ex: GeneratorExample, train: bool = False, rng: RngState | None = None) -> tuple[Tensor, int, int]:
        """Teacher-forced negative log-likelihood of the gold question.

        Returns (loss, token count, clamp count); the token count covers
        the end-of-sequence step. Gold tokens outside both the target
        vocabulary and the source sentence train as unknown-word
        targets; zero-probability targets clamp at 1e-12 so the loss
        stays finite, with the clamp counted.
        """
        inputs = self.embed_inputs(ex, train, rng)
        enc = self.encode(inputs, ex.tokens, train, rng)
        dyn = DynamicVocab(self.vocab, ex.tokens)
        state = self.initial_state(enc)
        targets = [dyn.id_of(t) for t in ex.question] + [EOS_ID]
        prev_id = SOS_ID
        terms = []
        clamped = 0
        for target in targets:
            step = self.decode_step(self.prev_embedding(prev_id, train, rng), state, enc, dyn, train, rng)
            p = pick(step.dist, target)
            if p.data.item() < 1e-12:
                clamped += 1
            terms.append(log(clamp_min(p, 1e-12)))
            state = step.state
            prev_id = target
        if clamped:
            logger.warning("clamped %d zero-probability gold tokens", clamped)
        loss = -tsum(stack(terms))
        return loss, len(targets), clamped

    def perplexity(self, dataset: list[GeneratorExample]) -> float:
        """exp(total NLL / total gold tokens), dropout off."""
        if not dataset:
            raise ValueError("empty dataset")
        total = 0.0
        count = 0
        for ex in dataset:
            loss, n, _ = self.nll(ex)
            total += loss.item()
            count += n
        return float(np.exp(total / count))

    # ------------------------------------------------------------- search

    def step_fn(self, enc: EncoderOutput, dyn: DynamicVocab):
        """Adapter for the beam-search core: maps (previous dynamic id,
        decoder state) to (log-probability vector, next state)."""

        def step(prev_id: int, state: tuple[Tensor, Tensor]):
            out = self.decode_step(self.prev_embedding(prev_id), state, enc, dyn)
            with np.errstate(divide="ignore"):
                logp = np.log(out.dist.data)
            return logp, out.state

        return step

    def generate(self, ex: GeneratorExample, beam_size: int | None = None):
        """Beam-search a question for one transformed sentence."""
        from .beam import beam_search

        inputs = self.embed_inputs(ex)
        enc = self.encode(inputs, ex.tokens)
        dyn = DynamicVocab(self.vocab, ex.tokens)
        result = beam_search(
            self.step_fn(enc, dyn),
            self.initial_state(enc),
            start_id=SOS_ID,
            eos_id=EOS_ID,
            beam_size=beam_size or self.config.beam_size,
            max_len=self.config.max_decode_len,
        )
        tokens = [dyn.token_of(i) for i in result.token_ids]
        return tokens, result
