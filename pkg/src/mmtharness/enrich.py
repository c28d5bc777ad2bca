"""Build tag-enriched source lines: ``<sentence> ## <tag1> , <tag2> , ...``."""

from __future__ import annotations

from typing import Collection, Mapping, Sequence

from .corpus import Box, CaptionRecord, DetectionSet, GtAnnotationSet, GtObject

SEPARATOR = "##"
TAG_DELIMITER = ","

VARIANTS = ("none", "vita", "vita-gt", "vita-col", "vita-gt-col", "vita-adj", "vita-gt-adj")


def fold_plural(word: str) -> str:
    """Lowercase and strip a single trailing plural 's' (but not from '-ss')."""
    word = word.strip().lower()
    if len(word) > 1 and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


def select_tags(dets: DetectionSet, k: int = 10) -> list[str]:
    """Labels of the ``k`` most confident detections, highest first.

    Ties keep input order; duplicate labels are kept.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    ranked = sorted(dets.detections, key=lambda d: -d.score)
    return [d.label for d in ranked[:k]]


def build_input(sentence: str, tags: Sequence[str]) -> str:
    if not sentence or not sentence.strip():
        raise ValueError("cannot enrich an empty sentence")
    for tag in tags:
        if not tag:
            raise ValueError("empty tag")
    if not tags:
        return f"{sentence} {SEPARATOR}"
    return f"{sentence} {SEPARATOR} " + f" {TAG_DELIMITER} ".join(tags)


def split_input(line: str) -> tuple[str, list[str]]:
    """Inverse of :func:`build_input`."""
    if line.endswith(f" {SEPARATOR}") and f" {SEPARATOR} " not in line:
        return line[: -len(SEPARATOR) - 1], []
    sentence, _, tail = line.partition(f" {SEPARATOR} ")
    if not _:
        return line, []
    return sentence, tail.split(f" {TAG_DELIMITER} ")


def _kept_gt_objects(gt: GtAnnotationSet, region: Box, min_overlap: float) -> list[GtObject]:
    if region.w <= 0 or region.h <= 0:
        raise ValueError("region must have positive width and height")
    if not 0.0 <= min_overlap <= 1.0:
        raise ValueError(f"min_overlap must lie in [0, 1], got {min_overlap}")
    kept = []
    for obj in gt.objects:
        if obj.box is None or obj.box.area <= 0:
            continue
        inter = obj.box.intersection(region)
        if inter > 0 and inter / obj.box.area > min_overlap:
            kept.append(obj)
    return kept


def filter_gt_objects(gt: GtAnnotationSet, region: Box, min_overlap: float = 0.0) -> list[str]:
    """Names of ground-truth objects that overlap the caption region.

    An object is kept when the fraction of its own area inside ``region``
    exceeds ``min_overlap``; the first name of each kept object is emitted
    in annotation order.
    """
    return [obj.names[0] for obj in _kept_gt_objects(gt, region, min_overlap)]


def _qualifying(attributes: Sequence[str], attr_filter: Collection[str] | None) -> list[str]:
    out = []
    for a in attributes:
        if attr_filter is not None and a.lower() not in attr_filter:
            continue
        if a not in out:
            out.append(a)
    return out


def _decorate(tag: str, attrs: Sequence[str]) -> str:
    return " ".join([*attrs, tag]) if attrs else tag


def attach_attributes(tags: Sequence[str], gt: GtAnnotationSet | None,
                      attr_filter: Collection[str] | None = None) -> list[str]:
    """Prefix each tag with the attributes of the ground-truth object it names.

    ``attr_filter`` restricts which attributes qualify (a color lexicon, an
    adjective set); ``None`` accepts every annotated attribute. Tags with no
    matching object pass through unchanged.
    """
    if gt is None:
        return list(tags)
    index: dict[str, GtObject] = {}
    for obj in gt.objects:
        for name in obj.names:
            index.setdefault(fold_plural(name), obj)
    out = []
    for tag in tags:
        obj = index.get(fold_plural(tag))
        out.append(tag if obj is None else _decorate(tag, _qualifying(obj.attributes, attr_filter)))
    return out


def tags_for_variant(variant: str, record: CaptionRecord,
                     detections: Mapping[str, DetectionSet] | None = None,
                     gt: Mapping[str, GtAnnotationSet] | None = None, *,
                     k: int = 10, min_overlap: float = 0.0,
                     color_filter: Collection[str] | None = None,
                     adjective_filter: Collection[str] | None = None) -> list[str] | None:
    """Tag list for one record under an enrichment variant; ``None`` for the bare variant.

    Detector-based variants use the top-``k`` detections. Ground-truth
    variants use the region-filtered objects, truncated to ``k``, each
    decorated with its own qualifying attributes for the -col/-adj forms.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown enrichment variant {variant!r}")
    if variant == "none":
        return None
    attr_filter: Collection[str] | None = None
    if variant.endswith("-col"):
        if color_filter is None:
            raise ValueError(f"variant {variant!r} needs a color lexicon")
        attr_filter = color_filter
    elif variant.endswith("-adj"):
        attr_filter = adjective_filter

    if variant.startswith("vita-gt"):
        gt_set = (gt or {}).get(record.image_id)
        if gt_set is None:
            return []
        kept = _kept_gt_objects(gt_set, record.region, min_overlap)[:k]
        if variant == "vita-gt":
            return [obj.names[0] for obj in kept]
        return [_decorate(obj.names[0], _qualifying(obj.attributes, attr_filter)) for obj in kept]

    dets = (detections or {}).get(record.image_id)
    tags = select_tags(dets, k) if dets is not None else []
    if variant == "vita":
        return tags
    return attach_attributes(tags, (gt or {}).get(record.image_id), attr_filter)
