import json

import pytest

from kgcycles.errors import StageError, ValidationError
from kgcycles.pipeline import ERRATA, PipelineConfig, run_pipeline


def test_report_sections(tmp_path):
    rep = run_pipeline(PipelineConfig(output_dir=str(tmp_path)))
    keys = {"series", "regime_analysis", "changepoints", "capacity", "forecast", "errata", "provenance"}
    assert keys <= set(rep.data)
    assert rep["changepoints"] is None
    assert len(rep["regime_analysis"]["ratios"]) == 3
    assert rep["forecast"]["paper-compat"]["predicted_change_years"] == [2021, 2030]
    assert rep["forecast"]["base_duration"] == 105 and rep["forecast"]["anchor_year"] == 2006
    written = sorted(p.name for p in tmp_path.iterdir())
    assert written == ["fig1.svg", "fig2.svg", "fig3.svg", "fig4.svg", "fig5.svg", "koch.svg", "report.json"]
    assert json.loads((tmp_path / "report.json").read_text()) == rep.data


def test_errata_touched_by_default_run():
    rep = run_pipeline(PipelineConfig(), write=False)
    ids = [e["id"] for e in rep["errata"]]
    assert sorted(ids) == sorted(ERRATA)
    assert len(set(ids)) == len(ids)


def test_errata_depend_on_run():
    rep = run_pipeline(PipelineConfig(segmentation=[1900, 1950, 2000], mode="exact"), write=False)
    ids = {e["id"] for e in rep["errata"]}
    assert "k4-insufficient-data" not in ids
    assert "third-duration-25-vs-26" not in ids
    assert "paper-compat-rounding-chain" not in ids


def test_auto_segmentation():
    rep = run_pipeline(PipelineConfig(segmentation="auto", k=3, min_len=10), write=False)
    cp = rep["changepoints"]
    assert len(cp["breakpoints"]) == 3
    assert rep["forecast"]["anchor_year"] == cp["breakpoints"][-1]


def test_divergent_beta_writes_nothing(tmp_path):
    with pytest.raises(StageError) as exc:
        run_pipeline(PipelineConfig(beta=5, output_dir=str(tmp_path)))
    assert exc.value.stage == "capacity"
    assert not any(tmp_path.iterdir())


def test_bad_input_is_stage_tagged(tmp_path):
    bad = tmp_path / "p.csv"
    bad.write_text("year,value\n1840,abc\n")
    with pytest.raises(StageError, match=r"\[ingest\].*line 2"):
        run_pipeline(PipelineConfig(patents_path=str(bad)), write=False)


def test_config_from_json(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"segmentation": "paper", "capacity": {"beta": 7.0}, "forecast": {"mode": "exact"}}))
    c = PipelineConfig.from_json(cfg)
    assert (c.beta, c.mode) == (7.0, "exact")
    with pytest.raises(ValidationError):
        PipelineConfig.from_dict({"bogus": 1})


def test_report_precision():
    rep = run_pipeline(PipelineConfig(), write=False)
    text = rep.to_json()
    slope = rep["regime_analysis"]["fits"][0]["slope"]
    assert repr(slope) in text
    k1 = next(c for c in rep["paper_comparison"] if c["quantity"] == "k1")
    assert k1["rounded"] == round(slope, 3) and k1["paper_value"] == 2.887
