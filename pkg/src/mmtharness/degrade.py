"""Source-side degradation: entity, color, adjective and random masking.

Masked positions for a sentence are a prefix of a pseudorandom permutation
of its candidate positions. The permutation depends only on the seed, the
sentence index and the mode, so masked sets grow monotonically with the
masking fraction.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Collection, Iterable, Mapping, Sequence

from .corpus import DetectionSet
from .enrich import fold_plural, select_tags
from .textproc import ADJ, NOUN, PROPN, TokenSeq, default_color_lexicon

MODES = ("entity", "color", "adjective", "random")
DEFAULT_MASK = "<mask>"
DEFAULT_FRACTIONS = tuple(i / 10 for i in range(11))
ENTITY_TAGS = frozenset({NOUN, PROPN})


@dataclass(frozen=True)
class MaskPlan:
    mode: str
    fraction: float
    seed: int = 0
    mask_symbol: str = DEFAULT_MASK

    def __post_init__(self):
        if self.mode not in MODES and self.mode != "train":
            raise ValueError(f"unknown masking mode {self.mode!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"fraction must lie in [0, 1], got {self.fraction}")
        if not self.mask_symbol:
            raise ValueError("mask symbol must be non-empty")


@dataclass(frozen=True)
class OverlapStats:
    entities_in_text: int
    object_tags: int
    entities_in_tags: int
    pct_entities_in_tags: float


def round_half_up(x) -> int:
    """Round to the nearest integer, halves upward.

    Floats go through their shortest repr so that e.g. ``0.15 * 20`` and
    ``0.5 * 5`` land where a reader expects.
    """
    if isinstance(x, Fraction):
        return math.floor(x + Fraction(1, 2))
    if isinstance(x, float):
        x = Decimal(repr(x))
    return int(Decimal(x).to_integral_value(rounding=ROUND_HALF_UP))


def mask_count(fraction: float, n: int) -> int:
    return round_half_up(Decimal(repr(float(fraction))) * n)


def permutation(items: Sequence[int], seed: int, index: int, mode: str) -> list[int]:
    """Seeded shuffle of ``items`` keyed by (seed, sentence index, mode)."""
    key = hashlib.sha256(f"{seed}:{index}:{mode}".encode()).digest()
    rng = random.Random(int.from_bytes(key[:8], "big"))
    out = list(items)
    rng.shuffle(out)
    return out


def mask_candidates(seq: TokenSeq, mode: str,
                    color_lexicon: Collection[str] | None = None) -> list[int]:
    if mode == "random":
        return list(range(len(seq)))
    if mode == "color":
        lex = default_color_lexicon() if color_lexicon is None else color_lexicon
        return [i for i, tok in enumerate(seq.tokens) if tok.lower() in lex]
    if mode in ("entity", "adjective"):
        if seq.pos is None:
            raise ValueError(f"{mode} masking needs POS tags on the sentence")
        wanted = ENTITY_TAGS if mode == "entity" else {ADJ}
        return [i for i, tag in enumerate(seq.pos) if tag in wanted]
    raise ValueError(f"unknown masking mode {mode!r}")


def masked_positions(plan: MaskPlan, candidates: Sequence[int], index: int = 0) -> list[int]:
    m = mask_count(plan.fraction, len(candidates))
    return permutation(candidates, plan.seed, index, plan.mode)[:m]


def apply_mask(seq: TokenSeq, plan: MaskPlan, candidates: Sequence[int], index: int = 0) -> TokenSeq:
    """Replace ``round_half_up(fraction * len(candidates))`` candidate tokens by the mask symbol."""
    for c in candidates:
        if not 0 <= c < len(seq):
            raise IndexError(f"candidate {c} out of range for {len(seq)} tokens")
    tokens = list(seq.tokens)
    for i in masked_positions(plan, candidates, index):
        tokens[i] = plan.mask_symbol
    return seq.with_tokens(tokens)


def mask_corpus(corpus: Sequence[TokenSeq], plan: MaskPlan,
                color_lexicon: Collection[str] | None = None) -> list[TokenSeq]:
    if plan.mode == "color" and color_lexicon is None:
        color_lexicon = default_color_lexicon()
    return [apply_mask(seq, plan, mask_candidates(seq, plan.mode, color_lexicon), i)
            for i, seq in enumerate(corpus)]


def check_fractions(fractions: Sequence[float]) -> None:
    if not fractions:
        raise ValueError("fraction grid is empty")
    for f in fractions:
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"fraction {f} outside [0, 1]")
    if any(b < a for a, b in zip(fractions, fractions[1:])):
        raise ValueError(f"fractions must be sorted ascending: {list(fractions)}")


def mask_schedule(corpus: Sequence[TokenSeq], mode: str,
                  fractions: Sequence[float] = DEFAULT_FRACTIONS, seed: int = 0,
                  mask_symbol: str = DEFAULT_MASK,
                  color_lexicon: Collection[str] | None = None) -> list[tuple[float, list[TokenSeq]]]:
    check_fractions(fractions)
    if mode == "color" and color_lexicon is None:
        color_lexicon = default_color_lexicon()
    candidates = [mask_candidates(seq, mode, color_lexicon) for seq in corpus]
    out = []
    for f in fractions:
        plan = MaskPlan(mode, f, seed, mask_symbol)
        out.append((f, [apply_mask(seq, plan, cand, i)
                        for i, (seq, cand) in enumerate(zip(corpus, candidates))]))
    return out


def train_mask(seq: TokenSeq, rate: float = 0.15, seed: int = 0, index: int = 0,
               mask_symbol: str = DEFAULT_MASK) -> TokenSeq:
    """Training-time masking over all positions of the sentence."""
    plan = MaskPlan("train", rate, seed, mask_symbol)
    return apply_mask(seq, plan, range(len(seq)), index)


def overlap_stats(items: Iterable[tuple[str, TokenSeq]],
                  detections: Mapping[str, DetectionSet],
                  top_k: int | None = None) -> OverlapStats:
    """Overlap between entity tokens in the text and the image's object tags.

    ``items`` pairs each record's image id with its POS-tagged source.
    With ``top_k`` set, only the tags fed to the model are counted.
    """
    entities = tags_total = hits = 0
    for image_id, seq in items:
        if seq.pos is None:
            raise ValueError("overlap statistics need POS tags on the source side")
        dets = detections.get(image_id)
        if dets is None:
            tags = []
        elif top_k is None:
            tags = [d.label for d in dets.detections]
        else:
            tags = select_tags(dets, top_k)
        tags_total += len(tags)
        tag_words = {fold_plural(w) for tag in tags for w in tag.split()}
        for tok, tag in zip(seq.tokens, seq.pos):
            if tag in ENTITY_TAGS:
                entities += 1
                if fold_plural(tok) in tag_words:
                    hits += 1
    pct = 100.0 * hits / entities if entities else 0.0
    return OverlapStats(entities, tags_total, hits, pct)
