"""Translation metrics and the degradation-percentage summary."""

from __future__ import annotations

from dataclasses import dataclass

from .amfm import AmfmScore, AmSpace, NgramLM, amfm, corpus_amfm, train_am, train_fm
from .bleu import BleuBreakdown, bleu
from .ribes import RibesScore, corpus_ribes, ribes


def degradation_pct(base: float, degraded: float, ndigits: int | None = 1) -> float:
    """Relative score loss in percent, ``100 * (base - degraded) / base``."""
    if base <= 0:
        raise ValueError(f"base score must be positive, got {base}")
    pct = 100.0 * (base - degraded) / base
    return round(pct, ndigits) if ndigits is not None else pct


@dataclass(frozen=True)
class DegradationRow:
    base_bleu: float
    degraded_bleu: float
    degradation_pct: float | None

    @classmethod
    def from_scores(cls, base: float, degraded: float) -> "DegradationRow":
        pct = degradation_pct(base, degraded, ndigits=None) if base > 0 else None
        return cls(base, degraded, pct)


__all__ = [
    "AmfmScore", "AmSpace", "BleuBreakdown", "DegradationRow", "NgramLM", "RibesScore",
    "amfm", "bleu", "corpus_amfm", "corpus_ribes", "degradation_pct", "ribes",
    "train_am", "train_fm",
]
