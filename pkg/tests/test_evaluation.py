"""Tests for the acceptance suite runner"""
import json

import pytest

from evaluation.generate_suite import ACCEPTANCE_CHECKS, default_suite, generate_suite
from evaluation.metrics import (
    CHECKS, AlphaModelCheck, EllipseRatiosCheck, HausdorffOracleCheck, StructuralInvariantsCheck
)
from evaluation.run_evaluation import Evaluator, TraceLog, load_suite
from leafmap.config import RunConfig
from leafmap.errors import LeafMapError

CHEAP_CHECKS = [
    {"check": "FuchsianWitnessCheck", "params": {}, "thresholds": {}},
    {"check": "BenzecriCheck", "params": {"steps": 20}, "thresholds": {}},
    {"check": "HausdorffOracleCheck", "params": {"pairs": 5, "max_vertices": 40}, "thresholds": {}},
]


@pytest.fixture
def evaluator(tmp_path):
    return Evaluator(suite_path=tmp_path / "suite.json", trace_path=tmp_path / "trace.json")


def test_cheap_checks_pass(evaluator, tmp_path):
    output = tmp_path / "results" / "acceptance.json"
    results = evaluator.run_evaluation(CHEAP_CHECKS, output, RunConfig())
    assert results["summary"]["all_passed"]
    assert results["summary"]["passed"] == 3
    assert results["summary"]["runtime"]["count"] == 3
    with open(output) as f:
        assert json.load(f)["config_hash"] == RunConfig().config_hash()
    with open(tmp_path / "trace.json") as f:
        runs = json.load(f)["runs"]
    assert len(runs) == 1
    assert runs[0]["config_hash"] == RunConfig().config_hash()
    assert [c["check"] for c in runs[0]["checks"]] == ["fuchsian_witness", "benzecri", "hausdorff_oracle"]
    assert all(c["passed"] for c in runs[0]["checks"])


def test_tight_threshold_fails(evaluator, tmp_path):
    checks = [{"check": "BenzecriCheck", "params": {"steps": 2}, "thresholds": {"threshold": 1e-30}}]
    results = evaluator.run_evaluation(checks, tmp_path / "out.json", RunConfig())
    assert not results["summary"]["all_passed"]
    assert results["summary"]["failed_checks"] == ["benzecri"]


def test_unknown_check(evaluator, tmp_path):
    with pytest.raises(LeafMapError):
        evaluator.run_evaluation([{"check": "NoSuchCheck"}], tmp_path / "out.json", RunConfig())


def test_trace_keeps_one_record_per_run(tmp_path):
    trace = tmp_path / "trace.json"
    for seed in (1, 2):
        Evaluator(tmp_path / "suite.json", trace).run_evaluation(CHEAP_CHECKS[:1], tmp_path / "o.json",
                                                                 RunConfig(seed=seed))
    log = TraceLog.load(trace)
    assert len(log.runs) == 2
    assert log.runs[0].config_hash != log.runs[1].config_hash
    assert [len(run.checks) for run in log.runs] == [1, 1]


def test_unreadable_trace_starts_fresh(tmp_path):
    trace = tmp_path / "trace.json"
    trace.write_text("[{\"query\": \"not a run\"}]")
    assert TraceLog.load(trace).runs == []
    assert TraceLog.load(tmp_path / "missing.json").runs == []


def test_load_suite(tmp_path):
    assert len(load_suite(tmp_path / "missing.json")) == len(ACCEPTANCE_CHECKS) == 8
    path = tmp_path / "smoke.json"
    generate_suite("smoke", path)
    checks = load_suite(path)
    assert [c["check"] for c in checks] == [c["check"] for c in ACCEPTANCE_CHECKS]


def test_suites_only_name_known_checks():
    for name in ("acceptance", "smoke"):
        for entry in default_suite(name)["checks"]:
            assert entry["check"] in CHECKS
            CHECKS[entry["check"]](**entry["thresholds"])


def test_smoke_suite_is_smaller():
    smoke = {c["check"]: c["params"] for c in default_suite("smoke")["checks"]}
    assert smoke["HausdorffOracleCheck"]["pairs"] < 50
    assert default_suite()["checks"][0]["params"]["leaf_count"] == 8


def test_ellipse_ratios_check_at_length_four():
    outcome = EllipseRatiosCheck().compute(RunConfig(), max_len=4)
    assert outcome["details"]["skipped"] == 0
    assert outcome["details"]["words"] == 3200
    assert outcome["passed"]


def test_hausdorff_oracle_check_reports_both_oracles():
    outcome = HausdorffOracleCheck().compute(RunConfig(), pairs=5, max_vertices=40)
    assert outcome["passed"]
    assert outcome["details"]["max_sampled_error"] <= outcome["details"]["spacing"]


def test_alpha_model_check(run_config):
    outcome = AlphaModelCheck().compute(run_config)
    assert outcome["passed"]
    assert outcome["details"]["leaf_alpha_exact"] == pytest.approx(2.0, abs=1e-8)


def test_structural_invariants_check(run_config):
    outcome = StructuralInvariantsCheck().compute(run_config, trials=5)
    assert outcome["passed"]
    assert set(outcome["details"]["errors"]) == {"sym_cube", "conjugation", "powers", "frame_map"}


def test_structural_invariants_check_with_default_trials(run_config):
    outcome = StructuralInvariantsCheck().compute(run_config)
    assert outcome["details"]["trials"] == 20
    assert outcome["passed"]
