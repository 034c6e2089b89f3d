import json

import pytest

from pcone.errors import UnknownSuite
from pcone.suites import SUITES, SuiteConfig, run_suite


@pytest.mark.parametrize("suite", SUITES)
def test_each_suite_passes_small(suite):
    rep = run_suite(SuiteConfig(seed=3, n=3, trials=3, suites=(suite,)), threads=1)
    assert rep.summary["checks"] > 0
    assert rep.passed, [r for r in rep.records if not r["pass"]]


def test_deterministic_reports():
    cfg = SuiteConfig(seed=7, n=4, trials=10, suites=("emi",))
    assert run_suite(cfg).to_jsonl() == run_suite(cfg).to_jsonl()


def test_thread_count_does_not_change_output():
    cfg = SuiteConfig(seed=11, n=3, trials=6, suites=("emi", "cpr", "bestapprox"))
    assert run_suite(cfg, threads=1).to_jsonl() == run_suite(cfg, threads=4).to_jsonl()


def test_seed_changes_instances():
    a = run_suite(SuiteConfig(seed=1, n=3, trials=2, suites=("emi",)))
    b = run_suite(SuiteConfig(seed=2, n=3, trials=2, suites=("emi",)))
    assert a.records[0]["inputs_digest"] != b.records[0]["inputs_digest"]


def test_zero_trials_is_vacuous_pass():
    rep = run_suite(SuiteConfig(trials=0, suites=("emi",)))
    assert rep.passed and rep.summary["checks"] == 0


def test_record_shape():
    rep = run_suite(SuiteConfig(seed=5, n=3, trials=1, suites=("loewner-heinz",)))
    lines = rep.to_jsonl().splitlines()
    first, last = json.loads(lines[0]), json.loads(lines[-1])
    assert {"suite", "trial", "name", "gap", "inputs_digest", "tolerance_used", "pass"} <= set(first)
    assert last["summary"]["failed"] == 0 and last["summary"]["pass"] is True
    csv = rep.to_csv().splitlines()
    assert csv[0].startswith("suite,trial,name") and csv[-1].startswith("summary,")


def test_tolerance_only_loosens_floors():
    rep = run_suite(SuiteConfig(seed=5, n=3, trials=1, tol=1e-3, suites=("cpr",)))
    assert all(r["tolerance_used"] >= 1e-3 for r in rep.records)


def test_p_filter_outside_suite_range_runs_nothing():
    # parallelogram only runs at p = 2
    rep = run_suite(SuiteConfig(seed=5, n=3, trials=2, p_values=("1.5",), suites=("parallelogram",)))
    assert rep.summary["checks"] == 0 and rep.passed


def test_p_restriction():
    rep = run_suite(SuiteConfig(seed=5, n=3, trials=1, p_values=("2",), suites=("emi",)))
    assert {r["name"] for r in rep.records} == {"emi[p=2]", "emi-commuting[p=2]"}


def test_traces_collected():
    rep = run_suite(SuiteConfig(seed=5, n=3, trials=1, trace=True, suites=("bestapprox", "cpr")))
    assert rep.traces and rep.traces_csv().startswith("suite,trial,solver,iteration")


@pytest.mark.parametrize(
    "kwargs, exc",
    [({"tol": -1.0}, ValueError), ({"suites": ("nope",)}, UnknownSuite), ({"n": 1}, ValueError), ({"trials": -1}, ValueError)],
)
def test_config_validation(kwargs, exc):
    with pytest.raises(exc):
        SuiteConfig(**kwargs)
