import json
import sys

import pytest

from mmtharness.metrics import DegradationRow, degradation_pct
from mmtharness.runner import (
    ExperimentConfig, ExperimentReport, ReportRow, emit_report, load_config, run_experiment,
    summarize, table_tsv,
)

from synthetic import experiment_config


def _config(paths, tmp_path, **kw):
    return ExperimentConfig.from_dict(experiment_config(paths, tmp_path / "out", **kw))


def _echo(name="echo", variant="none"):
    return {"name": name, "variant": variant, "translator": {"kind": "builtin-echo"}}


def test_random_masking_echo_degrades(synthetic, tmp_path):
    cfg = _config(synthetic, tmp_path, mode="random", systems=[_echo()])
    cfg.fractions = (0.0, 1.0)
    report = run_experiment(cfg)
    (f0, b0), (f1, b1) = report.curve("echo")
    assert (f0, f1) == (0.0, 1.0)
    assert b1 <= b0


def test_dictionary_curve_monotone(synthetic, tmp_path):
    report = run_experiment(_config(synthetic, tmp_path))
    for name in ("mBART", "ViTA"):
        curve = report.curve(name)
        assert len(curve) == 11
        scores = [b for _, b in curve]
        assert all(b <= a + 1e-9 for a, b in zip(scores, scores[1:]))
        assert scores[0] > scores[-1]
    # the word table drops the tag suffix, so both systems translate identically
    assert report.curve("mBART") == report.curve("ViTA")


def test_summary_matches_degradation_pct(synthetic, tmp_path):
    report = run_experiment(_config(synthetic, tmp_path))
    for name, row in report.summary.items():
        curve = dict(report.curve(name))
        assert row.base_bleu == curve[0.0] and row.degraded_bleu == curve[1.0]
        assert round(row.degradation_pct, 1) == degradation_pct(curve[0.0], curve[1.0])


def test_reports_are_deterministic(synthetic, tmp_path):
    cfg = _config(synthetic, tmp_path)
    a = emit_report(run_experiment(cfg), tmp_path / "a")
    b = emit_report(run_experiment(cfg), tmp_path / "b")
    assert [p.name for p in a] == ["table.tsv", "report.json", "scores.jsonl", "curves.tsv"]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_shared_hypothesis_file_gives_identical_rows(synthetic, tmp_path):
    hyp = tmp_path / "hyp.txt"
    refs = [line.split("\t")[6] for line in synthetic["corpus"].read_text(encoding="utf-8").splitlines()]
    hyp.write_text("\n".join(r.split()[0] for r in refs) + "\n", encoding="utf-8")
    systems = [{"name": n, "variant": "none",
                "translator": {"kind": "hypothesis-file", "path": str(hyp)}} for n in ("A", "B")]
    report = run_experiment(_config(synthetic, tmp_path, systems=systems))
    assert report.curve("A") == report.curve("B")
    assert report.summary["A"] == report.summary["B"]


def test_enriched_inputs_reach_translator(synthetic, tmp_path):
    script = tmp_path / "tee.py"
    script.write_text("import sys\nlog = open(sys.argv[1], 'a', encoding='utf-8')\n"
                      "for l in sys.stdin:\n    log.write(l); log.flush(); print(l.strip(), flush=True)\n",
                      encoding="utf-8")
    systems = [
        {"name": n, "variant": v, "translator": {
            "kind": "external-command", "command": [sys.executable, str(script), str(tmp_path / n)]}}
        for n, v in (("plain", "none"), ("vita", "vita"), ("gt", "vita-gt-col"))
    ]
    cfg = _config(synthetic, tmp_path, systems=systems)
    cfg.fractions = (0.0, 1.0)
    cfg.metrics = ("bleu", "ribes", "amfm")
    report = run_experiment(cfg)
    assert not report.failures
    assert len(report.rows) == 6
    assert all(r.ribes is not None and r.amfm is not None for r in report.rows)

    seen = {n: (tmp_path / n).read_text(encoding="utf-8").splitlines() for n in ("plain", "vita", "gt")}
    assert all(len(v) == 100 for v in seen.values())
    assert not any("##" in l for l in seen["plain"])
    assert all(" ## " in l for l in seen["vita"])
    # masking hits the sentence, never the tags
    masked = seen["vita"][50:]
    assert all("<mask>" not in l.split(" ## ")[1] for l in masked)
    assert any("<mask>" in l.split(" ## ")[0] for l in masked)
    assert all(" ## " in l and "sky" not in l for l in seen["gt"])


def test_failed_system_is_recorded(synthetic, tmp_path):
    systems = [_echo("ok"), {"name": "broken", "variant": "none",
                             "translator": {"kind": "hypothesis-file", "path": str(tmp_path / "none.txt")}}]
    report = run_experiment(_config(synthetic, tmp_path, systems=systems))
    assert "broken" in report.failures
    assert report.systems() == ["ok"]
    assert "broken" not in table_tsv(report)


def test_entity_mode_needs_pos(synthetic, tmp_path):
    data = experiment_config(synthetic, tmp_path / "out")
    del data["pos"]
    with pytest.raises(ValueError, match="POS"):
        run_experiment(ExperimentConfig.from_dict(data))


def test_config_validation(synthetic, tmp_path):
    base = experiment_config(synthetic, tmp_path / "out")
    with pytest.raises(ValueError, match="unknown config keys"):
        ExperimentConfig.from_dict({**base, "colour": 1})
    with pytest.raises(ValueError, match="unique"):
        ExperimentConfig.from_dict({**base, "systems": [_echo(), _echo()]})
    with pytest.raises(ValueError, match="metric"):
        ExperimentConfig.from_dict({**base, "metrics": ["meteor"]})
    with pytest.raises(ValueError, match="variant"):
        ExperimentConfig.from_dict({**base, "systems": [_echo(variant="vita-x")]})


def test_load_config_resolves_relative_paths(synthetic, tmp_path):
    data = experiment_config(synthetic, "out")
    data["corpus"] = "corpus.tsv"
    cfg_path = synthetic["corpus"].parent / "exp.json"
    cfg_path.write_text(json.dumps(data), encoding="utf-8")
    cfg = load_config(cfg_path)
    assert cfg.corpus == synthetic["corpus"]
    assert cfg.output_dir == synthetic["corpus"].parent / "out"


def test_table_row_for_published_numbers(tmp_path):
    report = ExperimentReport("entity", summary={"mBART": DegradationRow.from_scores(44.2, 15.1)})
    emit_report(report, tmp_path)
    lines = (tmp_path / "table.tsv").read_text(encoding="utf-8").splitlines()
    assert lines == ["system\tno_masking\tentity_masking\tdegradation_pct", "mBART\t44.2\t15.1\t65.8"]


def test_empty_report_writes_headers(tmp_path):
    emit_report(ExperimentReport("color"), tmp_path)
    assert (tmp_path / "table.tsv").read_text() == "system\tno_masking\tcolor_masking\tdegradation_pct\n"
    assert (tmp_path / "curves.tsv").read_text() == "system\tfraction\tbleu\n"
    assert (tmp_path / "scores.jsonl").read_text() == ""
    assert json.loads((tmp_path / "report.json").read_text())["rows"] == []


def test_zero_base_is_nan():
    report = ExperimentReport("entity", summary={"x": DegradationRow.from_scores(0.0, 0.0)})
    assert table_tsv(report).splitlines()[1] == "x\t0.0\t0.0\tnan"


def test_curves_preserve_order(tmp_path):
    rows = [ReportRow(s, "random", f, b) for s, f, b in
            [("zeta", 0.0, 9.0), ("zeta", 0.5, 4.0), ("alpha", 0.0, 7.0), ("alpha", 0.5, 7.0)]]
    report = ExperimentReport("random", rows=rows)
    emit_report(report, tmp_path, formats=("curve-data",))
    assert (tmp_path / "curves.tsv").read_text().splitlines()[1:] == [
        "zeta\t0.0000\t9.0000", "zeta\t0.5000\t4.0000", "alpha\t0.0000\t7.0000", "alpha\t0.5000\t7.0000"]
    with pytest.raises(ValueError):
        emit_report(report, tmp_path, formats=("xml",))


def test_summarize_without_endpoints():
    rows = [ReportRow("s", "random", f, b) for f, b in [(0.2, 40.0), (0.4, 30.0), (0.6, 10.0)]]
    s = summarize(rows)
    assert (s.base_bleu, s.degraded_bleu) == (40.0, 10.0)


def test_scores_jsonl_records(synthetic, tmp_path):
    cfg = _config(synthetic, tmp_path, systems=[_echo()])
    cfg.fractions = (0.0, 0.5)
    emit_report(run_experiment(cfg), tmp_path / "o")
    recs = [json.loads(l) for l in (tmp_path / "o" / "scores.jsonl").read_text().splitlines()]
    assert [r["corpus_id"] for r in recs] == ["corpus/echo/entity@0.0000", "corpus/echo/entity@0.5000"]
    assert set(recs[0]) == {"metric", "corpus_id", "value", "breakdown"}
    assert len(recs[0]["breakdown"]["precisions"]) == 4
