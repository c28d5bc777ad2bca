"""Loaders for the caption corpus, detector output and ground-truth objects."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .textproc import TokenSeq, tokenize_en, tokenize_hi


class CorpusFormatError(ValueError):
    """A record failed to parse or validate; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source:
            where = f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float

    @property
    def area(self) -> float:
        return max(self.w, 0) * max(self.h, 0)

    def intersection(self, other: "Box") -> float:
        dx = min(self.x + self.w, other.x + other.w) - max(self.x, other.x)
        dy = min(self.y + self.h, other.y + other.h) - max(self.y, other.y)
        if dx <= 0 or dy <= 0:
            return 0.0
        return dx * dy

    def as_list(self) -> list:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class CaptionRecord:
    image_id: str
    region: Box
    source_text: str
    target_text: str

    def __post_init__(self):
        if not self.image_id:
            raise ValueError("image_id is empty")
        if self.region.w <= 0 or self.region.h <= 0:
            raise ValueError(f"region w and h must be positive, got w={self.region.w} h={self.region.h}")
        if not self.source_text.strip():
            raise ValueError("source text is empty")
        if not self.target_text.strip():
            raise ValueError("target text is empty")


@dataclass(frozen=True)
class Detection:
    label: str
    score: float
    box: Box | None = None

    def __post_init__(self):
        if not self.label:
            raise ValueError("detection label is empty")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"detection score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class DetectionSet:
    image_id: str
    detections: tuple[Detection, ...] = ()

    def __len__(self):
        return len(self.detections)


@dataclass(frozen=True)
class GtObject:
    names: tuple[str, ...]
    attributes: tuple[str, ...] = ()
    box: Box | None = None

    def __post_init__(self):
        if not self.names:
            raise ValueError("ground-truth object has no names")


@dataclass(frozen=True)
class GtAnnotationSet:
    image_id: str
    objects: tuple[GtObject, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.image_id:
            raise ValueError("image_id is empty")


@dataclass(frozen=True)
class CorpusStats:
    pair_count: int
    avg_src_tokens: float
    avg_tgt_tokens: float


# --- HVG tsv ----------------------------------------------------------------

def _parse_int(value: str, name: str, lineno: int, source: str | None) -> int:
    try:
        return int(value)
    except ValueError:
        raise CorpusFormatError(f"{name} is not an integer: {value!r}", lineno, source) from None


def parse_corpus(lines: Iterable[str], source: str | None = None) -> list[CaptionRecord]:
    records = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if line.endswith("\r"):
            line = line[:-1]
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise CorpusFormatError(f"expected 7 tab-separated fields, got {len(fields)}", lineno, source)
        image_id, x, y, w, h, src, tgt = fields
        box = Box(*(_parse_int(v, n, lineno, source) for v, n in zip((x, y, w, h), "xywh")))
        try:
            records.append(CaptionRecord(image_id, box, src, tgt))
        except ValueError as e:
            raise CorpusFormatError(str(e), lineno, source) from None
    return records


def load_corpus(path: str | Path, format: str = "hvg-tsv") -> list[CaptionRecord]:
    if format != "hvg-tsv":
        raise ValueError(f"unsupported corpus format {format!r}")
    with open(path, encoding="utf-8", newline="\n") as f:
        return parse_corpus(f, str(path))


def format_corpus(records: Iterable[CaptionRecord]) -> str:
    out = []
    for r in records:
        b = r.region
        out.append("\t".join([r.image_id, str(b.x), str(b.y), str(b.w), str(b.h),
                              r.source_text, r.target_text]) + "\n")
    return "".join(out)


def save_corpus(records: Iterable[CaptionRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_corpus(records))


# --- line-delimited JSON annotations ---------------------------------------

def _iter_json_lines(path: str | Path):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"invalid JSON: {e.msg}", lineno, str(path)) from None
            if not isinstance(rec, dict) or not rec.get("image_id"):
                raise CorpusFormatError("record needs a non-empty 'image_id'", lineno, str(path))
            yield lineno, rec


def _parse_box(raw, lineno, source) -> Box:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise CorpusFormatError(f"box must be [x, y, w, h], got {raw!r}", lineno, source)
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise CorpusFormatError(f"box coordinates must be numbers, got {raw!r}", lineno, source)
    return Box(*raw)


def load_detections(path: str | Path) -> dict[str, DetectionSet]:
    """Read detector output, one ``{"image_id", "objects": [...]}`` record per line."""
    source = str(path)
    out: dict[str, DetectionSet] = {}
    for lineno, rec in _iter_json_lines(path):
        image_id = str(rec["image_id"])
        if image_id in out:
            raise CorpusFormatError(f"duplicate image_id {image_id!r}", lineno, source)
        dets = []
        for obj in rec.get("objects", []):
            try:
                label = str(obj["label"]).strip().lower()
                score = float(obj["score"])
            except (KeyError, TypeError, ValueError):
                raise CorpusFormatError(f"detection needs 'label' and numeric 'score': {obj!r}",
                                        lineno, source) from None
            box = _parse_box(obj["box"], lineno, source) if obj.get("box") is not None else None
            try:
                dets.append(Detection(label, score, box))
            except ValueError as e:
                raise CorpusFormatError(str(e), lineno, source) from None
        out[image_id] = DetectionSet(image_id, tuple(dets))
    return out


def load_gt_annotations(path: str | Path) -> dict[str, GtAnnotationSet]:
    source = str(path)
    out: dict[str, GtAnnotationSet] = {}
    for lineno, rec in _iter_json_lines(path):
        image_id = str(rec["image_id"])
        if image_id in out:
            raise CorpusFormatError(f"duplicate image_id {image_id!r}", lineno, source)
        objects = []
        for obj in rec.get("objects", []):
            names = [str(n).strip() for n in obj.get("names") or [] if str(n).strip()]
            if not names:
                raise CorpusFormatError("ground-truth object has no names", lineno, source)
            attrs = [str(a).strip() for a in obj.get("attributes") or [] if str(a).strip()]
            if obj.get("box") is None:
                raise CorpusFormatError("ground-truth object has no box", lineno, source)
            objects.append(GtObject(tuple(names), tuple(attrs), _parse_box(obj["box"], lineno, source)))
        out[image_id] = GtAnnotationSet(image_id, tuple(objects))
    return out


def corpus_stats(records: Sequence[CaptionRecord],
                 src_tokenizer: Callable[[str], TokenSeq] = tokenize_en,
                 tgt_tokenizer: Callable[[str], TokenSeq] = tokenize_hi) -> CorpusStats:
    n = len(records)
    if n == 0:
        return CorpusStats(0, 0.0, 0.0)
    src = sum(len(src_tokenizer(r.source_text)) for r in records)
    tgt = sum(len(tgt_tokenizer(r.target_text)) for r in records)
    return CorpusStats(n, src / n, tgt / n)
