"""Corpus BLEU with a single reference per segment and no smoothing."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ._common import as_tokens


@dataclass(frozen=True)
class BleuBreakdown:
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    score: float
    matches: tuple[int, ...] = ()
    totals: tuple[int, ...] = ()


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(hyps: Sequence, refs: Sequence, max_n: int = 4) -> BleuBreakdown:
    """Corpus-level BLEU on tokenized segments.

    Clipped n-gram matches and totals are summed over the corpus before
    taking precisions. Orders for which no hypothesis has any n-gram are
    left out of the geometric mean (so short identical corpora still score
    100); any remaining order with zero matches gives a score of 0.
    """
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise ValueError("cannot score an empty corpus")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for h, r in zip(hyps, refs):
        h, r = as_tokens(h), as_tokens(r)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, max_n + 1):
            hc = ngram_counts(h, n)
            rc = ngram_counts(r, n)
            matches[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
            totals[n - 1] += max(len(h) - n + 1, 0)

    precisions = tuple(m / t if t else 0.0 for m, t in zip(matches, totals))
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1 - ref_len / hyp_len)

    orders = [p for p, t in zip(precisions, totals) if t]
    if not orders or min(orders) == 0.0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in orders) / len(orders))
    return BleuBreakdown(precisions, bp, hyp_len, ref_len, score, tuple(matches), tuple(totals))
