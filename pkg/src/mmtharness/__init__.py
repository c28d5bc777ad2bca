"""Experiment harness for tag-enriched multimodal translation.

Object tags from an image are appended to the English source, the source
is degraded by masking entities, colors, adjectives or random tokens, and
any translator is scored with BLEU, RIBES and AMFM.
"""

from .corpus import (
    Box, CaptionRecord, CorpusFormatError, CorpusStats, Detection, DetectionSet, GtAnnotationSet,
    GtObject, corpus_stats, load_corpus, load_detections, load_gt_annotations,
)
from .degrade import (
    MaskPlan, OverlapStats, apply_mask, mask_candidates, mask_schedule, overlap_stats, train_mask,
)
from .enrich import attach_attributes, build_input, filter_gt_objects, select_tags
from .metrics import amfm, bleu, degradation_pct, ribes, train_am, train_fm
from .textproc import (
    Lexicon, SubwordVocab, TokenSeq, pos_annotate, prune_vocab, subword_segment, tokenize_en,
    tokenize_hi,
)

__version__ = "0.1.0"
