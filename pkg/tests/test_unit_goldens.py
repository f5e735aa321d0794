import json
from pathlib import Path

import pandas as pd
import pytest

from src.cli import main
from src.services.errors import ConfigurationError
from src.services.goldens import (bless, canonical_csv, digest, load_cases, save_cases, verify_case,
                                   verify_goldens)
from src.services.storage import write_frame


CASES = [
    {"name": "analyze-pareto", "command": "analyze",
     "args": {"law_spec": {"name": "pareto", "params": {"theta": 2.0}}, "points": 3}},
    {"name": "estimate-small", "command": "estimate",
     "args": {"input_path": "data/sample.csv", "p_levels": [0.99]}},
]


@pytest.fixture()
def cases_path(tmp_path, data_file):
    (tmp_path / "data").mkdir()
    (tmp_path / "data" / "sample.csv").write_text(data_file.read_text())
    path = tmp_path / "cases.json"
    path.write_text(json.dumps(CASES))
    return path


def test_canonical_csv(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("b,a\n0.30000000000000004,x\n2,y\n")
    assert canonical_csv(path) == "a,b\nx,0.3\ny,2\n"


def test_unblessed_cases_fail(cases_path):
    report = verify_goldens(cases_path)
    assert not report.passed
    assert [o.detail for o in report.outcomes] == ["not blessed", "not blessed"]


def test_bless_then_verify(cases_path):
    cases = bless(cases_path)
    assert set(cases[0].artifacts) == {"pareto_analyze.csv", "pareto_hill_overlay.csv"}
    assert set(cases[1].artifacts) == {"hill.csv", "trace.csv", "quantiles.csv"}
    assert (cases_path.parent / "estimate-small" / "estimate.json").exists()
    assert load_cases(cases_path) == cases
    report = verify_goldens(cases_path)
    assert report.passed, [o.detail for o in report.outcomes]
    assert all(delta == 0.0 for o in report.outcomes for delta in o.deltas.values())


def test_changed_arguments_detected(cases_path):
    cases = bless(cases_path)
    changed = [cases[0].model_copy(update={"args": {**cases[0].args, "points": 4}}), cases[1]]
    save_cases(changed, cases_path)
    report = verify_goldens(cases_path)
    assert not report.passed
    assert report.outcomes[0].detail == "case arguments changed since blessing"
    assert report.outcomes[1].passed


def test_drift_beyond_tolerance_fails(cases_path):
    cases = bless(cases_path)
    blessed = cases_path.parent / "analyze-pareto" / "pareto_analyze.csv"
    frame = pd.read_csv(blessed)
    frame["theta_fit"] = frame["theta_fit"] * 1.001
    write_frame(frame, blessed)
    tampered = cases[0].model_copy(update={"artifacts": {"pareto_analyze.csv": digest(blessed)},
                                           "tolerance": {"rel": 0.0, "abs": 0.0}})
    save_cases([tampered, cases[1]], cases_path)
    report = verify_goldens(cases_path)
    assert not report.passed
    assert "column theta_fit drifted" in report.outcomes[0].detail


def test_drift_within_tolerance_passes(cases_path):
    cases = bless(cases_path)
    blessed = cases_path.parent / "analyze-pareto" / "pareto_analyze.csv"
    frame = pd.read_csv(blessed)
    frame["theta_fit"] = frame["theta_fit"] * (1.0 + 1e-9)
    write_frame(frame, blessed)
    tampered = cases[0].model_copy(update={"artifacts": {"pareto_analyze.csv": digest(blessed)},
                                           "tolerance": {"rel": 1e-6, "abs": 0.0}})
    save_cases([tampered, cases[1]], cases_path)
    report = verify_goldens(cases_path)
    assert report.passed
    assert report.outcomes[0].deltas["pareto_analyze.csv"] > 0.0


def test_malformed_cases(tmp_path):
    path = tmp_path / "cases.json"
    path.write_text('[{"name": "x"}]')
    with pytest.raises(ConfigurationError):
        load_cases(path)
    with pytest.raises(ConfigurationError):
        load_cases(tmp_path / "missing.json")


def test_goldens_command(cases_path, capsys):
    assert main(["goldens", "verify", "--cases", str(cases_path)]) == 1
    assert "FAIL analyze-pareto: not blessed" in capsys.readouterr().out
    assert main(["goldens", "bless", "--cases", str(cases_path)]) == 0
    assert main(["goldens", "verify", "--cases", str(cases_path)]) == 0
    assert "ok   estimate-small" in capsys.readouterr().out


def test_bless_prunes_only_stale_csv(cases_path):
    case_dir = cases_path.parent / "analyze-pareto"
    case_dir.mkdir()
    (case_dir / "old.csv").write_text("a\n1\n")
    (case_dir / "notes.txt").write_text("kept\n")
    bless(cases_path)
    assert not (case_dir / "old.csv").exists()
    assert (case_dir / "notes.txt").exists()
    assert (case_dir / "pareto_analyze.csv").exists()


BANDED = [
    {"name": "analyze-pareto", "command": "analyze",
     "args": {"law_spec": {"name": "pareto", "params": {"theta": 2.0}}, "points": 3},
     "bands": [{"artifact": "pareto_analyze.csv", "column": "theta_fit", "where": {"t": 2.0},
                "low": 1.99, "high": 2.01},
               {"artifact": "pareto_analyze.csv", "column": "alpha", "low": 1.5}]},
]


def test_bands_checked_without_blessing(tmp_path):
    path = tmp_path / "cases.json"
    path.write_text(json.dumps(BANDED))
    report = verify_goldens(path)
    assert report.passed, [o.detail for o in report.outcomes]
    assert report.outcomes[0].deltas == {}


def test_band_violation_reported(tmp_path):
    cases = json.loads(json.dumps(BANDED))
    cases[0]["bands"][0]["high"] = 1.999
    cases[0]["bands"].append({"artifact": "pareto_analyze.csv", "column": "chi2", "where": {"t": 3.0}, "high": 1.0})
    path = tmp_path / "cases.json"
    path.write_text(json.dumps(cases))
    detail = verify_goldens(path).outcomes[0].detail
    assert "theta_fit at t=2 = 2 outside [1.99, 1.999]" in detail
    assert "no row with t=3" in detail


def test_empty_band_rejected(tmp_path):
    cases = json.loads(json.dumps(BANDED))
    cases[0]["bands"][0]["low"] = 3.0
    path = tmp_path / "cases.json"
    path.write_text(json.dumps(cases))
    with pytest.raises(ConfigurationError):
        load_cases(path)


def test_shipped_analytic_cases_verify():
    cases_path = Path(__file__).resolve().parent.parent / "goldens" / "cases.json"
    cases = load_cases(cases_path)
    assert {"table1-cauchy", "calibrate-1000", "pareto-consistency"} <= {c.name for c in cases}
    recorded = [c for c in cases if c.artifacts]
    assert {c.name for c in recorded} == {"analyze-pareto", "analyze-changepoint", "estimate-pareto-quantiles"}
    for case in recorded:
        outcome = verify_case(case, cases_path.parent)
        assert outcome.passed, (case.name, outcome.detail)
