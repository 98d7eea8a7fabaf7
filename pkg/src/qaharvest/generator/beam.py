"""Beam search over summed log-probabilities, decoder-agnostic.

The decoder is any callable (prev_token_id, state) -> (log-prob vector,
next state). Hypotheses that emit EOS move to a completed pool; the
best completed hypothesis wins (no length normalization), with ties
broken by generation order and then lower token id. If nothing
completes within max_len the best-scoring capped hypothesis is returned
flagged "unterminated".

The plain algorithm can prune the greedy argmax chain and end up
returning a worse-scoring sequence than greedy decoding would. To keep
beam-b results never worse than greedy, the greedy lineage is
protected: its next child always survives selection, occupying an extra
slot beyond the beam width if it has to. With beam_size 1 the search
degenerates to exactly greedy decoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["BeamResult", "beam_search"]


@dataclass
class BeamResult:
    token_ids: list[int]  # emitted ids, EOS not included
    logp: float  # includes the EOS step when terminated
    terminated: bool
    flags: list[str] = field(default_factory=list)


@dataclass
class _Hyp:
    ids: tuple[int, ...]
    logp: float
    state: object
    prev: int
    greedy: bool


def beam_search(
    step_fn: Callable,
    init_state,
    start_id: int,
    eos_id: int,
    beam_size: int = 3,
    max_len: int = 30,
) -> BeamResult:
    if beam_size < 1:
        raise ValueError("beam size must be >= 1")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    alive = [_Hyp((), 0.0, init_state, start_id, True)]
    completed: list[tuple[float, int, tuple[int, ...]]] = []
    generation = 0

    for _ in range(max_len):
        if not alive:
            break
        # candidate tuple: (total logp, parent index, token id, parent, state)
        candidates = []
        greedy_mark: tuple[int, int] | None = None
        for p_idx, hyp in enumerate(alive):
            logp_vec, new_state = step_fn(hyp.prev, hyp.state)
            width = min(beam_size, logp_vec.size)
            part = np.argpartition(-logp_vec, width - 1)[:width]
            picked = sorted(part, key=lambda i: (-logp_vec[i], i))
            for tok in picked:
                total = hyp.logp + float(logp_vec[tok])
                # zero-probability tokens are not real hypotheses
                if total == -np.inf:
                    continue
                candidates.append((total, p_idx, int(tok), hyp, new_state))
            if hyp.greedy and np.isfinite(logp_vec[picked[0]]):
                # argmax with ties to the lowest id; always hyp's top pick
                greedy_mark = (p_idx, int(picked[0]))
        if not candidates:
            break
        candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
        keep = candidates[:beam_size]
        if greedy_mark is not None and not any((c[1], c[2]) == greedy_mark for c in keep):
            keep.append(next(c for c in candidates if (c[1], c[2]) == greedy_mark))
        next_alive = []
        for total, p_idx, tok, hyp, new_state in keep:
            generation += 1
            is_greedy = greedy_mark == (p_idx, tok)
            if tok == eos_id:
                completed.append((total, generation, hyp.ids))
            else:
                next_alive.append(_Hyp(hyp.ids + (tok,), total, new_state, tok, is_greedy))
        alive = next_alive

    if completed:
        best = max(completed, key=lambda c: (c[0], -c[1], tuple(-i for i in c[2])))
        return BeamResult(list(best[2]), best[0], True)
    best_hyp = max(alive, key=lambda h: (h.logp, len(h.ids)))
    return BeamResult(list(best_hyp.ids), best_hyp.logp, False, ["unterminated"])
