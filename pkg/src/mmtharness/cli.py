"""Command-line entry point: ``mmtharness <subcommand> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .degrade import DEFAULT_MASK, MODES, mask_schedule, overlap_stats, train_mask
from .enrich import VARIANTS, build_input, tags_for_variant
from .metrics import bleu, corpus_amfm, corpus_ribes, train_am, train_fm
from .runner import emit_report, load_config, run_experiment
from .textproc import (
    DEFAULT_SPECIALS, LexiconTagger, SidecarTags, annotate_corpus, default_color_lexicon, default_tag_map,
    load_lexicon, load_tag_map, load_vocab, prune_vocab, tokenize_en, tokenize_hi,
)
from .translators import KINDS, TranslatorSpec, translate

log = logging.getLogger("mmtharness")


def parse_fractions(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from None


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return f.read().splitlines()


def _write_lines(path, lines) -> None:
    text = "".join(line + "\n" for line in lines)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _add_pos_args(p):
    g = p.add_argument_group("POS annotation (sidecar file or lexicon fallback)")
    g.add_argument("--pos-sidecar", help="token<TAB>tag file, blank line between sentences")
    g.add_argument("--tag-map", help="tag map file (default: Universal POS)")
    g.add_argument("--nouns", help="noun lexicon for the hermetic tagger")
    g.add_argument("--adjectives", help="adjective lexicon for the hermetic tagger")


def _pos_source(args):
    if args.pos_sidecar:
        tag_map = load_tag_map(args.tag_map) if args.tag_map else default_tag_map()
        return SidecarTags.load(args.pos_sidecar, tag_map)
    if args.nouns:
        adj = load_lexicon(args.adjectives) if args.adjectives else None
        return LexiconTagger(load_lexicon(args.nouns), adj)
    return None


def _colors(args):
    return load_lexicon(args.color_lexicon) if getattr(args, "color_lexicon", None) else default_color_lexicon()


def cmd_stats(args) -> int:
    print("split\tpairs\tavg_src_tokens\tavg_tgt_tokens")
    for path in args.corpus:
        st = corpus_mod.corpus_stats(corpus_mod.load_corpus(path))
        print(f"{Path(path).stem}\t{st.pair_count}\t{st.avg_src_tokens:.2f}\t{st.avg_tgt_tokens:.2f}")
    return 0


def cmd_enrich(args) -> int:
    records = corpus_mod.load_corpus(args.corpus)
    dets = corpus_mod.load_detections(args.detections) if args.detections else {}
    gt = corpus_mod.load_gt_annotations(args.gt) if args.gt else {}
    adj = load_lexicon(args.adjective_lexicon).words if args.adjective_lexicon else None
    out = []
    for r in records:
        tags = tags_for_variant(args.variant, r, dets, gt, k=args.top_k,
                                min_overlap=args.min_overlap, color_filter=_colors(args),
                                adjective_filter=adj)
        out.append(r.source_text if tags is None else build_input(r.source_text, tags))
    _write_lines(args.out, out)
    return 0


def cmd_mask(args) -> int:
    records = corpus_mod.load_corpus(args.corpus)
    seqs = [tokenize_en(r.source_text) for r in records]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    if args.train_rate is not None:
        masked = [train_mask(s, args.train_rate, args.seed, i, args.mask_symbol)
                  for i, s in enumerate(seqs)]
        name = f"train_{args.train_rate:.2f}.txt"
        _write_lines(out_dir / name, [s.text() for s in masked])
        manifest.append({"file": name, "mode": "train", "fraction": args.train_rate,
                         "seed": args.seed, "mask_symbol": args.mask_symbol})
    else:
        source = _pos_source(args)
        if source is not None:
            seqs = annotate_corpus(seqs, source)
        for fraction, masked in mask_schedule(seqs, args.mode, args.fractions, args.seed,
                                              args.mask_symbol, _colors(args)):
            name = f"{args.mode}_{fraction:.2f}.txt"
            _write_lines(out_dir / name, [s.text() for s in masked])
            manifest.append({"file": name, "mode": args.mode, "fraction": fraction,
                             "seed": args.seed, "mask_symbol": args.mask_symbol})
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, ensure_ascii=False, indent=2)
        f.write("\n")
    return 0


def cmd_overlap(args) -> int:
    records = corpus_mod.load_corpus(args.corpus)
    source = _pos_source(args)
    if source is None:
        raise SystemExit("overlap needs --pos-sidecar or --nouns")
    seqs = annotate_corpus([tokenize_en(r.source_text) for r in records], source)
    dets = corpus_mod.load_detections(args.detections)
    k = None if args.top_k < 0 else args.top_k
    st = overlap_stats(((r.image_id, s) for r, s in zip(records, seqs)), dets, top_k=k)
    print("entities_in_text\tobject_tags\tentities_in_tags\tpct_entities_in_tags")
    print(f"{st.entities_in_text}\t{st.object_tags}\t{st.entities_in_tags}\t{st.pct_entities_in_tags:.2f}")
    return 0


def cmd_prune_vocab(args) -> int:
    vocab = load_vocab(args.vocab, args.marker)
    corpora = []
    for path in args.corpus:
        if path.endswith(".tsv"):
            recs = corpus_mod.load_corpus(path)
            corpora.append([r.source_text for r in recs] + [r.target_text for r in recs])
        else:
            corpora.append(_read_lines(path))
    pruned = prune_vocab(vocab, corpora, args.special or DEFAULT_SPECIALS)
    _write_lines(args.out, pruned.units)
    log.info("kept %d of %d units", len(pruned), len(vocab))
    return 0


def cmd_score(args) -> int:
    hyps = [tokenize_hi(h) for h in _read_lines(args.hyp)]
    if args.ref.endswith(".tsv"):
        ref_text = [r.target_text for r in corpus_mod.load_corpus(args.ref)]
    else:
        ref_text = _read_lines(args.ref)
    refs = [tokenize_hi(r) for r in ref_text]
    cid = args.corpus_id or Path(args.hyp).stem
    records = []
    b = bleu(hyps, refs)
    records.append({"metric": "bleu", "corpus_id": cid, "value": round(b.score, 4),
                    "breakdown": {"precisions": [round(p, 4) for p in b.precisions],
                                  "bp": round(b.brevity_penalty, 4),
                                  "hyp_len": b.hyp_len, "ref_len": b.ref_len}})
    if "ribes" in args.metrics:
        records.append({"metric": "ribes", "corpus_id": cid,
                        "value": round(corpus_ribes(hyps, refs), 4), "breakdown": {}})
    if "amfm" in args.metrics:
        train = ([r.target_text for r in corpus_mod.load_corpus(args.amfm_train)]
                 if args.amfm_train else ref_text)
        am, fm = train_am(train, args.amfm_rank), train_fm(train)
        records.append({"metric": "amfm", "corpus_id": cid,
                        "value": round(corpus_amfm(hyps, refs, am, fm), 4), "breakdown": {}})
    _write_lines(args.out, [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in records])
    return 0


def cmd_translate(args) -> int:
    spec = TranslatorSpec(args.kind, command=args.command, path=args.path,
                          batch_size=args.batch_size, timeout=args.timeout,
                          persistent=not args.per_batch)
    sources = _read_lines(args.input) if args.input != "-" else sys.stdin.read().splitlines()
    _write_lines(args.output, translate(spec, sources))
    return 0


def cmd_experiment(args) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.mask_symbol is not None:
        overrides["mask_symbol"] = args.mask_symbol
    if args.fractions is not None:
        overrides["fractions"] = tuple(args.fractions)
    if args.top_k is not None:
        overrides["top_k"] = args.top_k
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.output_dir is not None:
        overrides["output_dir"] = Path(args.output_dir)
    if overrides:
        config = dataclasses.replace(config, **overrides)
    if config.output_dir is None:
        raise SystemExit("experiment needs an output directory (config 'output_dir' or --output-dir)")
    report = run_experiment(config)
    for path in emit_report(report, config.output_dir):
        log.info("wrote %s", path)
    for name, msg in report.failures.items():
        print(f"system {name} failed: {msg}", file=sys.stderr)
    sys.stdout.write(Path(config.output_dir, "table.tsv").read_text(encoding="utf-8"))
    return 1 if report.failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmtharness", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="pair counts and average token lengths per split")
    p.add_argument("corpus", nargs="+")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("enrich", help="write tag-enriched source lines")
    p.add_argument("--corpus", required=True)
    p.add_argument("--variant", choices=VARIANTS, default="vita")
    p.add_argument("--detections")
    p.add_argument("--gt")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--min-overlap", type=float, default=0.0)
    p.add_argument("--color-lexicon")
    p.add_argument("--adjective-lexicon")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("mask", help="write degraded source corpora and a manifest")
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", choices=MODES, default="random")
    p.add_argument("--fractions", type=parse_fractions, default=[i / 10 for i in range(11)])
    p.add_argument("--train-rate", type=float, help="training-time masking over all tokens instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mask-symbol", default=DEFAULT_MASK)
    p.add_argument("--color-lexicon")
    p.add_argument("--out-dir", required=True)
    _add_pos_args(p)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("overlap", help="entity / object-tag overlap statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--top-k", type=int, default=10, help="tags per image; negative counts all")
    _add_pos_args(p)
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("prune-vocab", help="drop subword units unused by the corpora")
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", nargs="+", required=True, help="text files, or .tsv corpora (both sides)")
    p.add_argument("--marker", default="")
    p.add_argument("--special", action="append", help="unit always kept (repeatable)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_prune_vocab)

    p = sub.add_parser("score", help="BLEU / RIBES / AMFM of a hypothesis file")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True, help="reference lines, or a .tsv corpus")
    p.add_argument("--metrics", type=lambda s: s.split(","), default=["bleu"])
    p.add_argument("--amfm-train")
    p.add_argument("--amfm-rank", type=int, default=100)
    p.add_argument("--corpus-id")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("translate", help="run a translator over a source file")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--command")
    p.add_argument("--path")
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--timeout", type=float, default=600.0)
    p.add_argument("--per-batch", action="store_true", help="start one child process per batch")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("experiment", help="run a full degradation experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--mask-symbol")
    p.add_argument("--fractions", type=parse_fractions)
    p.add_argument("--top-k", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as e:
        print(f"mmtharness: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
