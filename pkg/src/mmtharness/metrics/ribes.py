"""RIBES: normalized Kendall's tau over aligned word positions.

Score = nkt * precision**alpha * bp**beta, with a one-to-one alignment
built from unique unigrams, falling back to a unique left or right bigram
context for repeated words.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ._common import as_tokens


@dataclass(frozen=True)
class RibesScore:
    nkt: float
    unigram_precision: float
    bp: float
    score: float
    alignment: tuple[int, ...] = ()


def _bigram_positions(tokens):
    pos: dict[tuple[str, str], list[int]] = {}
    for i in range(len(tokens) - 1):
        pos.setdefault((tokens[i], tokens[i + 1]), []).append(i)
    return pos


def align(hyp: Sequence[str], ref: Sequence[str]) -> list[int]:
    """Reference position for each alignable hypothesis word, in hypothesis order."""
    ref_uni = Counter(ref)
    hyp_uni = Counter(hyp)
    ref_bi = _bigram_positions(ref)
    hyp_bi = _bigram_positions(hyp)

    def unique_both(bigram):
        return len(ref_bi.get(bigram, ())) == 1 and len(hyp_bi.get(bigram, ())) == 1

    used = set()
    out = []
    for i, word in enumerate(hyp):
        if ref_uni[word] == 0:
            continue
        pos = None
        if ref_uni[word] == 1 and hyp_uni[word] == 1:
            pos = ref.index(word)
        else:
            if i + 1 < len(hyp) and unique_both((word, hyp[i + 1])):
                pos = ref_bi[(word, hyp[i + 1])][0]
            elif i > 0 and unique_both((hyp[i - 1], word)):
                pos = ref_bi[(hyp[i - 1], word)][0] + 1
        if pos is not None and pos not in used:
            used.add(pos)
            out.append(pos)
    return out


def kendall_tau(ranks: Sequence[int]) -> float:
    n = len(ranks)
    if n < 2:
        raise ValueError("Kendall's tau needs at least two ranks")
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if ranks[i] < ranks[j]:
                concordant += 1
            elif ranks[i] > ranks[j]:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)


def ribes(hyp, ref, alpha: float = 0.25, beta: float = 0.10) -> RibesScore:
    hyp, ref = as_tokens(hyp), as_tokens(ref)
    if not hyp:
        return RibesScore(0.0, 0.0, 0.0, 0.0)
    bp = min(1.0, math.exp(1 - len(ref) / len(hyp)))
    alignment = align(hyp, ref)
    if len(alignment) < 2:
        precision = len(alignment) / len(hyp)
        return RibesScore(0.0, precision, bp, 0.0, tuple(alignment))
    nkt = (kendall_tau(alignment) + 1) / 2
    precision = len(alignment) / len(hyp)
    score = nkt * precision ** alpha * bp ** beta
    return RibesScore(nkt, precision, bp, score, tuple(alignment))


def corpus_ribes(hyps: Sequence, refs: Sequence, alpha: float = 0.25, beta: float = 0.10) -> float:
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise ValueError("cannot score an empty corpus")
    return sum(ribes(h, r, alpha, beta).score for h, r in zip(hyps, refs)) / len(hyps)
