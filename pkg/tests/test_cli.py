"""Tests for the command line front-end and its CSV/SVG artifacts"""
import json

import numpy as np
import pandas as pd
import pytest

from leafmap.config import RunConfig, load_config
from leafmap.errors import WordBudgetExceeded
from leafmap.outputs import read_csv, write_csv
from main import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, check_word_budget, main


@pytest.fixture
def workspace(tmp_path):
    """Config file plus rep and output paths under tmp_path"""
    config_path = tmp_path / "config.json"
    cfg = RunConfig(max_word_len=2, leaf_samples=32, leaf_count=3, general_position_trials=10)
    with open(config_path, 'w') as f:
        json.dump(cfg.model_dump(), f, indent=2)
    rep = tmp_path / "rep.json"
    out = tmp_path / "out"
    return {"config": str(config_path), "rep": str(rep), "out": out,
            "args": ["--config", str(config_path), "--rep", str(rep), "--out", str(out)]}


def built(workspace):
    assert main(workspace["args"] + ["build-rep"]) == EXIT_OK
    return workspace


def test_write_and_read_csv(tmp_path):
    frame = pd.DataFrame({"word": ["a1", "b1"], "value": [0.1, 1 / 3]})
    path = write_csv(frame, tmp_path / "nested" / "table.csv", "abc123")
    with open(path) as f:
        assert f.readline() == "# config_hash: abc123\n"
    loaded = read_csv(path)
    assert list(loaded.columns) == ["word", "value"]
    assert loaded["value"].tolist() == [0.1, 1 / 3]


def test_config_file_is_created_on_first_use(tmp_path):
    path = tmp_path / "fresh" / "config.json"
    cfg = load_config(path)
    assert path.exists()
    assert cfg.max_word_len == 3
    assert load_config(path, {"max_word_len": 1, "seed": None}).max_word_len == 1


def test_config_hash_tracks_changes():
    assert RunConfig().config_hash() == RunConfig().config_hash()
    assert RunConfig().config_hash() != RunConfig(seed=8).config_hash()


def test_word_budget():
    check_word_budget(8)
    with pytest.raises(WordBudgetExceeded):
        check_word_budget(9)


def test_build_rep(workspace):
    built(workspace)
    with open(workspace["rep"]) as f:
        payload = json.load(f)
    assert payload["rank"] == 4


def test_bent_at_zero_matches_fuchsian(workspace, tmp_path):
    built(workspace)
    bent_path = tmp_path / "bent.json"
    args = ["--config", workspace["config"], "--rep", str(bent_path)]
    assert main(args + ["build-rep", "--kind", "bent", "--eps", "0"]) == EXIT_OK
    with open(workspace["rep"]) as f, open(bent_path) as g:
        assert json.load(f)["generators"] == json.load(g)["generators"]


def test_bad_direction_is_a_domain_error(workspace):
    args = workspace["args"] + ["build-rep", "--kind", "bent", "--eps", "0.1",
                                "--direction", "1", "1", "1", "1"]
    assert main(args) == EXIT_DOMAIN


def test_missing_rep_is_a_domain_error(workspace):
    assert main(workspace["args"] + ["spectra"]) == EXIT_DOMAIN


def test_usage_errors(workspace):
    built(workspace)
    assert main(workspace["args"] + ["--max-len", "9", "spectra"]) == EXIT_USAGE
    assert main(workspace["args"] + ["--samples", "4", "leaves"]) == EXIT_USAGE
    assert main(workspace["args"] + ["model-fit", "--word", "e"]) == EXIT_DOMAIN
    with pytest.raises(SystemExit):
        main(workspace["args"] + ["no-such-command"])


def test_leaves_command(workspace):
    built(workspace)
    assert main(workspace["args"] + ["leaves"]) == EXIT_OK
    out = workspace["out"]
    for name in ("flag_table.csv", "leaf_0.csv", "leaf_2.csv", "leaf_0.svg",
                 "leaf_distances.csv", "leaf_summary.csv"):
        assert (out / name).exists()
    leaf = read_csv(out / "leaf_0.csv")
    assert list(leaf.columns) == ["y_angle", "px", "py", "pz", "chart_x", "chart_y"]
    summary = read_csv(out / "leaf_summary.csv")
    assert len(summary) == 3
    assert summary["convex"].all()
    distances = read_csv(out / "leaf_distances.csv")
    assert distances.drop(columns="angle").to_numpy().max() < 1e-6


def test_spectra_command_is_deterministic(workspace):
    built(workspace)
    out = workspace["out"]
    assert main(workspace["args"] + ["spectra"]) == EXIT_OK
    first = {name: (out / name).read_bytes() for name in ("spectra.csv", "cone.csv", "cone.svg")}
    assert main(workspace["args"] + ["spectra"]) == EXIT_OK
    for name, content in first.items():
        assert (out / name).read_bytes() == content

    spectra = read_csv(out / "spectra.csv")
    assert len(spectra) == 8 + 56
    assert np.abs(spectra["eq1_normalized"]).max() < 1e-8
    assert np.allclose(spectra[["ratio1", "ratio2"]].to_numpy(), 2.0, atol=1e-7)


def test_model_fit_command(workspace):
    built(workspace)
    args = workspace["args"] + ["--max-len", "3", "model-fit", "--word", "a1", "--scan"]
    assert main(args) == EXIT_OK
    fits = read_csv(workspace["out"] / "model_fit.csv")
    assert fits["point_type"].tolist() == ["plus", "minus"]
    assert np.allclose(fits["alpha_exact"], 2.0, atol=1e-8)
    mismatch = read_csv(workspace["out"] / "model_mismatch.csv")
    assert len(mismatch) == 8 + 56 + 392
    assert np.abs(mismatch["mismatch"]).max() < 1e-8


def test_benzecri_demo_command(workspace):
    assert main(workspace["args"] + ["benzecri-demo", "--steps", "5"]) == EXIT_OK
    distances = read_csv(workspace["out"] / "benzecri.csv")
    assert distances["k"].tolist() == list(range(6))
    assert (workspace["out"] / "benzecri.svg").exists()
    assert main(workspace["args"] + ["benzecri-demo", "--lam", "0.3"]) == EXIT_USAGE


def test_evaluate_command_writes_trace(workspace, tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"checks": [
        {"check": "FuchsianWitnessCheck", "params": {}, "thresholds": {}}]}))
    output, trace = tmp_path / "acceptance.json", tmp_path / "logs" / "trace.json"
    args = ["evaluate", "--suite", str(suite), "--output", str(output), "--trace", str(trace)]
    assert main(workspace["args"] + args) == EXIT_OK
    assert json.loads(output.read_text())["checks"]["fuchsian_witness"]["passed"]
    runs = json.loads(trace.read_text())["runs"]
    assert len(runs) == 1
    assert [c["check"] for c in runs[0]["checks"]] == ["fuchsian_witness"]
