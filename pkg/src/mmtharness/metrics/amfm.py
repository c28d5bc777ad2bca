"""AM-FM: latent-semantic adequacy blended with language-model fluency.

AM is the cosine between hypothesis and reference after projecting their
TF-IDF term vectors onto the top singular vectors of a target-language
term-sentence matrix. FM compares the per-token geometric-mean probability
of both sentences under an add-k smoothed n-gram model.

This is a reimplementation of the published construction. It is not
numerically compatible with any leaderboard scorer.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._common import as_tokens

BOS, EOS, UNK = "<s>", "</s>", "<unk>"


@dataclass(frozen=True)
class AmfmScore:
    am: float
    fm: float
    score: float


class AmSpace:
    """Rank-``r`` latent space over a TF-IDF term-sentence matrix."""

    def __init__(self, vocab: dict[str, int], idf: np.ndarray, basis: np.ndarray,
                 singular_values: np.ndarray):
        self.vocab = vocab
        self.idf = idf
        self.basis = basis  # (|V|, r), orthonormal columns
        self.singular_values = singular_values

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def term_vector(self, tokens: Sequence[str]) -> np.ndarray:
        v = np.zeros(len(self.vocab))
        for tok, c in Counter(tokens).items():
            row = self.vocab.get(tok)
            if row is not None:
                v[row] = c * self.idf[row]
        return v

    def project(self, tokens: Sequence[str]) -> np.ndarray:
        return self.basis.T @ self.term_vector(tokens)

    def similarity(self, hyp, ref) -> float:
        """Cosine in the latent space, clipped to [0, 1].

        Identical bags of words score exactly 1. Otherwise, when either
        projection vanishes the cosine is undefined and the score is 0.
        """
        h, r = as_tokens(hyp), as_tokens(ref)
        if Counter(h) == Counter(r):
            return 1.0
        ph, pr = self.project(h), self.project(r)
        nh, nr = float(np.linalg.norm(ph)), float(np.linalg.norm(pr))
        if nh == 0.0 or nr == 0.0:
            return 0.0
        cos = float(np.dot(ph, pr)) / (nh * nr)
        return min(1.0, max(0.0, cos))


def train_am(corpus: Sequence, rank: int) -> AmSpace:
    """Fit the adequacy space; ``rank`` is clamped to the matrix rank."""
    docs = [as_tokens(s) for s in corpus]
    if len(docs) < 2:
        raise ValueError("adequacy space needs at least two sentences")
    if rank < 1:
        raise ValueError(f"rank must be at least 1, got {rank}")
    vocab: dict[str, int] = {}
    for doc in docs:
        for tok in doc:
            vocab.setdefault(tok, len(vocab))
    if not vocab:
        raise ValueError("adequacy corpus has no tokens")
    n_docs = len(docs)
    df = np.zeros(len(vocab))
    for doc in docs:
        for tok in set(doc):
            df[vocab[tok]] += 1
    # smoothed idf keeps terms that occur in every sentence at a positive weight
    idf = np.log((1 + n_docs) / (1 + df)) + 1.0

    matrix = np.zeros((len(vocab), n_docs))
    for j, doc in enumerate(docs):
        for tok, c in Counter(doc).items():
            matrix[vocab[tok], j] = c * idf[vocab[tok]]

    u, s, _ = np.linalg.svd(matrix, full_matrices=False)
    tol = s[0] * max(matrix.shape) * np.finfo(float).eps if s.size else 0.0
    effective = int(np.sum(s > tol))
    r = min(rank, effective)
    return AmSpace(vocab, idf, u[:, :r].copy(), s[:r].copy())


class NgramLM:
    """Add-k smoothed n-gram model with sentence padding."""

    def __init__(self, n: int = 3, k: float = 0.1):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.k = k
        self.vocab: set[str] = {UNK, EOS}
        self.ngrams: Counter = Counter()
        self.contexts: Counter = Counter()

    def _padded(self, tokens: Sequence[str]) -> list[str]:
        return [BOS] * (self.n - 1) + list(tokens) + [EOS]

    def fit(self, corpus: Sequence) -> "NgramLM":
        docs = [as_tokens(s) for s in corpus]
        if not docs:
            raise ValueError("fluency model needs a non-empty corpus")
        for doc in docs:
            self.vocab.update(doc)
        for doc in docs:
            padded = self._padded(doc)
            for i in range(self.n - 1, len(padded)):
                gram = tuple(padded[i - self.n + 1:i + 1])
                self.ngrams[gram] += 1
                self.contexts[gram[:-1]] += 1
        return self

    def prob(self, context: Sequence[str], word: str) -> float:
        context = tuple(context)[-(self.n - 1):] if self.n > 1 else ()
        gram = context + (word,)
        return (self.ngrams[gram] + self.k) / (self.contexts[context] + self.k * len(self.vocab))

    def geometric_mean_prob(self, sentence) -> float:
        """Per-token geometric mean of p(w | history), including the end marker; 0 for empty input."""
        tokens = [t if t in self.vocab else UNK for t in as_tokens(sentence)]
        if not tokens:
            return 0.0
        padded = self._padded(tokens)
        logp = 0.0
        for i in range(self.n - 1, len(padded)):
            logp += math.log(self.prob(padded[i - self.n + 1:i], padded[i]))
        return math.exp(logp / (len(padded) - self.n + 1))


def train_fm(corpus: Sequence, n: int = 3, k: float = 0.1) -> NgramLM:
    return NgramLM(n, k).fit(corpus)


def fluency(hyp, ref, lm: NgramLM) -> float:
    qh, qr = lm.geometric_mean_prob(hyp), lm.geometric_mean_prob(ref)
    hi = max(qh, qr)
    if hi == 0.0:
        return 1.0
    return min(qh, qr) / hi


def amfm(hyp, ref, am_space: AmSpace | None, fm_lm: NgramLM | None, lam: float = 0.5) -> AmfmScore:
    if am_space is None or fm_lm is None:
        raise ValueError("AMFM needs a trained adequacy space and fluency model")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    am = am_space.similarity(hyp, ref)
    fm = fluency(hyp, ref, fm_lm)
    return AmfmScore(am, fm, lam * am + (1 - lam) * fm)


def corpus_amfm(hyps: Sequence, refs: Sequence, am_space: AmSpace, fm_lm: NgramLM,
                lam: float = 0.5) -> float:
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise ValueError("cannot score an empty corpus")
    return sum(amfm(h, r, am_space, fm_lm, lam).score for h, r in zip(hyps, refs)) / len(hyps)
