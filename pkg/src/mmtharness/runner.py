"""End-to-end degradation experiments and report files."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from . import corpus as corpus_mod
from .degrade import DEFAULT_FRACTIONS, DEFAULT_MASK, MODES, check_fractions, mask_schedule
from .enrich import VARIANTS, build_input, tags_for_variant
from .metrics import DegradationRow, bleu, corpus_amfm, corpus_ribes, train_am, train_fm
from .textproc import (
    LexiconTagger, SidecarTags, annotate_corpus, default_color_lexicon, default_tag_map,
    load_lexicon, load_tag_map, tokenize_en, tokenize_hi,
)
from .translators import TranslatorError, TranslatorSpec, translate

log = logging.getLogger(__name__)

METRICS = ("bleu", "ribes", "amfm")


@dataclass(frozen=True)
class SystemSpec:
    name: str
    translator: TranslatorSpec
    variant: str = "none"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"system {self.name!r}: unknown variant {self.variant!r}")


@dataclass
class ExperimentConfig:
    corpus: Path
    systems: list[SystemSpec]
    mode: str = "random"
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    seed: int = 0
    mask_symbol: str = DEFAULT_MASK
    metrics: tuple[str, ...] = ("bleu",)
    detections: Path | None = None
    gt_annotations: Path | None = None
    pos_sidecar: Path | None = None
    tag_map: Path | None = None
    noun_lexicon: Path | None = None
    pos_adjective_lexicon: Path | None = None
    adjective_lexicon: Path | None = None
    color_lexicon: Path | None = None
    top_k: int = 10
    gt_min_overlap: float = 0.0
    amfm_rank: int = 100
    amfm_train: Path | None = None
    amfm_lambda: float = 0.5
    output_dir: Path | None = None
    corpus_id: str | None = None

    def __post_init__(self):
        names = [s.name for s in self.systems]
        if len(set(names)) != len(names):
            raise ValueError(f"system names must be unique: {names}")
        if self.mode not in MODES:
            raise ValueError(f"unknown masking mode {self.mode!r}")
        self.fractions = tuple(float(f) for f in self.fractions)
        check_fractions(self.fractions)
        for m in self.metrics:
            if m not in METRICS:
                raise ValueError(f"unknown metric {m!r}")
        if "bleu" not in self.metrics:
            self.metrics = ("bleu", *self.metrics)
        if self.top_k < 0:
            raise ValueError("top_k must be non-negative")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base_dir: str | Path = ".") -> "ExperimentConfig":
        base = Path(base_dir)

        def path(value):
            if value is None:
                return None
            p = Path(value)
            return p if p.is_absolute() else base / p

        data = dict(data)
        systems = []
        for s in data.pop("systems", []):
            t = dict(s["translator"])
            if t.get("path") is not None:
                t["path"] = str(path(t["path"]))
            if isinstance(t.get("command"), list):
                t["command"] = tuple(t["command"])
            systems.append(SystemSpec(s["name"], TranslatorSpec(**t), s.get("variant", "none")))
        degradation = data.pop("degradation", {})
        pos = data.pop("pos", {}) or {}
        amfm = data.pop("amfm", {}) or {}
        kwargs = dict(
            corpus=path(data.pop("corpus")),
            systems=systems,
            mode=degradation.get("mode", "random"),
            fractions=tuple(degradation.get("fractions", DEFAULT_FRACTIONS)),
            seed=int(degradation.get("seed", 0)),
            mask_symbol=degradation.get("mask_symbol", DEFAULT_MASK),
            metrics=tuple(data.pop("metrics", ("bleu",))),
            detections=path(data.pop("detections", None)),
            gt_annotations=path(data.pop("gt_annotations", None)),
            pos_sidecar=path(pos.get("sidecar")),
            tag_map=path(pos.get("tag_map")),
            noun_lexicon=path(pos.get("nouns")),
            pos_adjective_lexicon=path(pos.get("adjectives")),
            adjective_lexicon=path(data.pop("adjective_lexicon", None)),
            color_lexicon=path(data.pop("color_lexicon", None)),
            top_k=int(data.pop("top_k", 10)),
            gt_min_overlap=float(data.pop("gt_min_overlap", 0.0)),
            amfm_rank=int(amfm.get("rank", 100)),
            amfm_train=path(amfm.get("train")),
            amfm_lambda=float(amfm.get("lambda", 0.5)),
            output_dir=path(data.pop("output_dir", None)),
            corpus_id=data.pop("corpus_id", None),
        )
        if data:
            raise ValueError(f"unknown config keys: {sorted(data)}")
        return cls(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        return ExperimentConfig.from_dict(json.load(f), path.parent)


@dataclass(frozen=True)
class ReportRow:
    system: str
    mode: str
    fraction: float
    bleu: float
    ribes: float | None = None
    amfm: float | None = None
    breakdown: Mapping[str, Any] = field(default_factory=dict, compare=False)


@dataclass
class ExperimentReport:
    mode: str
    seed: int = 0
    fractions: tuple[float, ...] = ()
    rows: list[ReportRow] = field(default_factory=list)
    summary: dict[str, DegradationRow] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    corpus_id: str = "corpus"

    def curve(self, system: str) -> list[tuple[float, float]]:
        return [(r.fraction, r.bleu) for r in self.rows if r.system == system]

    def systems(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.system not in seen:
                seen.append(r.system)
        for s in self.summary:
            if s not in seen:
                seen.append(s)
        return seen


def summarize(rows: Sequence[ReportRow]) -> DegradationRow:
    """Unmasked vs fully masked BLEU (first and last grid points when 0 or 1 is absent)."""
    by_fraction = {r.fraction: r.bleu for r in rows}
    base = by_fraction.get(0.0, rows[0].bleu)
    degraded = by_fraction.get(1.0, rows[-1].bleu)
    return DegradationRow.from_scores(base, degraded)


def _pos_source(config: ExperimentConfig):
    if config.pos_sidecar is not None:
        tag_map = load_tag_map(config.tag_map) if config.tag_map else default_tag_map()
        return SidecarTags.load(config.pos_sidecar, tag_map)
    if config.noun_lexicon is not None:
        adjectives = (load_lexicon(config.pos_adjective_lexicon)
                      if config.pos_adjective_lexicon else None)
        return LexiconTagger(load_lexicon(config.noun_lexicon), adjectives)
    return None


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    records = corpus_mod.load_corpus(config.corpus)
    if not records:
        raise ValueError(f"{config.corpus} has no records")
    corpus_id = config.corpus_id or Path(config.corpus).stem
    sources = [tokenize_en(r.source_text) for r in records]
    pos_source = _pos_source(config)
    if pos_source is not None:
        sources = annotate_corpus(sources, pos_source)
    elif config.mode in ("entity", "adjective"):
        raise ValueError(f"{config.mode} masking needs a POS sidecar or noun lexicon")
    colors = load_lexicon(config.color_lexicon) if config.color_lexicon else default_color_lexicon()
    adjective_filter = (load_lexicon(config.adjective_lexicon).words
                        if config.adjective_lexicon else None)

    detections = corpus_mod.load_detections(config.detections) if config.detections else {}
    gt = corpus_mod.load_gt_annotations(config.gt_annotations) if config.gt_annotations else {}
    refs = [tokenize_hi(r.target_text) for r in records]

    am_space = fm_lm = None
    if "amfm" in config.metrics:
        train_text = ([r.target_text for r in corpus_mod.load_corpus(config.amfm_train)]
                      if config.amfm_train else [r.target_text for r in records])
        am_space = train_am(train_text, config.amfm_rank)
        fm_lm = train_fm(train_text)

    schedule = mask_schedule(sources, config.mode, config.fractions, config.seed,
                             config.mask_symbol, colors)
    report = ExperimentReport(config.mode, config.seed, config.fractions, corpus_id=corpus_id)

    for system in config.systems:
        tags = [tags_for_variant(system.variant, r, detections, gt, k=config.top_k,
                                 min_overlap=config.gt_min_overlap, color_filter=colors,
                                 adjective_filter=adjective_filter) for r in records]
        rows = []
        try:
            for fraction, degraded in schedule:
                lines = [seq.text() if t is None else build_input(seq.text(), t)
                         for seq, t in zip(degraded, tags)]
                hyps = translate(system.translator, lines, fraction=fraction,
                                 mode=config.mode, system=system.name)
                hyp_seqs = [tokenize_hi(h) for h in hyps]
                b = bleu(hyp_seqs, refs)
                rows.append(ReportRow(
                    system.name, config.mode, fraction, b.score,
                    ribes=corpus_ribes(hyp_seqs, refs) if "ribes" in config.metrics else None,
                    amfm=(corpus_amfm(hyp_seqs, refs, am_space, fm_lm, config.amfm_lambda)
                          if am_space is not None else None),
                    breakdown={"precisions": list(b.precisions), "bp": b.brevity_penalty,
                               "hyp_len": b.hyp_len, "ref_len": b.ref_len},
                ))
                log.info("%s %s@%.2f BLEU %.2f", system.name, config.mode, fraction, b.score)
        except TranslatorError as e:
            log.error("system %s failed: %s", system.name, e)
            report.failures[system.name] = str(e)
            continue
        report.rows.extend(rows)
        report.summary[system.name] = summarize(rows)
    return report


# --- report files -----------------------------------------------------------

def _r4(x):
    if x is None:
        return None
    if isinstance(x, float):
        return None if math.isnan(x) else round(x, 4)
    if isinstance(x, list):
        return [_r4(v) for v in x]
    if isinstance(x, dict):
        return {k: _r4(v) for k, v in x.items()}
    return x


def _fmt1(x: float | None) -> str:
    return "nan" if x is None else f"{x:.1f}"


def table_tsv(report: ExperimentReport) -> str:
    lines = [f"system\tno_masking\t{report.mode}_masking\tdegradation_pct"]
    for name, row in report.summary.items():
        lines.append(f"{name}\t{_fmt1(row.base_bleu)}\t{_fmt1(row.degraded_bleu)}\t"
                     f"{_fmt1(row.degradation_pct)}")
    return "\n".join(lines) + "\n"


def curves_tsv(report: ExperimentReport) -> str:
    lines = ["system\tfraction\tbleu"]
    for name in report.systems():
        for fraction, score in report.curve(name):
            lines.append(f"{name}\t{fraction:.4f}\t{score:.4f}")
    return "\n".join(lines) + "\n"


def score_records(report: ExperimentReport) -> Iterable[dict]:
    for r in report.rows:
        cid = f"{report.corpus_id}/{r.system}/{r.mode}@{r.fraction:.4f}"
        yield {"metric": "bleu", "corpus_id": cid, "value": _r4(r.bleu),
               "breakdown": _r4(dict(r.breakdown))}
        if r.ribes is not None:
            yield {"metric": "ribes", "corpus_id": cid, "value": _r4(r.ribes), "breakdown": {}}
        if r.amfm is not None:
            yield {"metric": "amfm", "corpus_id": cid, "value": _r4(r.amfm), "breakdown": {}}


def report_json(report: ExperimentReport) -> str:
    data = {
        "corpus_id": report.corpus_id,
        "mode": report.mode,
        "seed": report.seed,
        "fractions": _r4(list(report.fractions)),
        "rows": [{"system": r.system, "mode": r.mode, "fraction": _r4(r.fraction),
                  "bleu": _r4(r.bleu), "ribes": _r4(r.ribes), "amfm": _r4(r.amfm)}
                 for r in report.rows],
        "summary": {name: {"no_masking": _r4(s.base_bleu), "masked": _r4(s.degraded_bleu),
                           "degradation_pct": _r4(s.degradation_pct)}
                    for name, s in report.summary.items()},
        "failures": dict(report.failures),
    }
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


REPORT_FILES = {
    "tsv": ("table.tsv", table_tsv),
    "curve-data": ("curves.tsv", curves_tsv),
    "json": ("report.json", report_json),
}


def emit_report(report: ExperimentReport, output_dir: str | Path,
                formats: Sequence[str] = ("tsv", "json", "curve-data")) -> list[Path]:
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out}: {e}") from e
    written = []
    for fmt in formats:
        if fmt not in REPORT_FILES:
            raise ValueError(f"unknown report format {fmt!r}")
        name, render = REPORT_FILES[fmt]
        written.append(_write(out / name, render(report)))
        if fmt == "json":
            lines = "".join(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n"
                            for rec in score_records(report))
            written.append(_write(out / "scores.jsonl", lines))
    return written


def _write(path: Path, text: str) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path
