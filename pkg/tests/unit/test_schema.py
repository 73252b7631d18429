import json

import pytest

from polarsym.config import CHECK_NAMES
from polarsym.errors import ConfigError
from polarsym.schema import Calibration, CheckReport, RunConfig, RunReport
from polarsym.utils import CheckResult


def make_config(**overrides):
    fields = {"example": "so2-r2", "checks": ["moment-identities", "weyl-intersection"], "samples": 5, "seed": 7}
    fields.update(overrides)
    return RunConfig.build(**fields)


def calibration():
    return Calibration(
        curvature_slot_choice=[0, 1, 2],
        unique=True,
        slot_residuals={"R(a,b)c": 0.0},
        formula_residuals={"HV": 0.0},
        samples=4,
    )


def test_all_expands_to_every_check_in_order():
    assert RunConfig.build(example="so3-adj").checks == list(CHECK_NAMES)


@pytest.mark.parametrize(
    "fields",
    [
        {"example": "klein-bottle"},
        {"example": "so2-r2", "checks": ["no-such-check"]},
        {"example": "so2-r2", "checks": []},
        {"example": "so2-r2", "samples": 0},
        {"example": "so2-r2", "seed": -1},
        {"example": "so2-r2", "tolerances": {"bogus": 1.0}},
        {"example": "so2-r2", "tolerances": {"weyl-intersection": -1.0}},
        {"example": "so2-r2", "format": "xml"},
        {"example": "so2-r2", "colour": "red"},
    ],
    ids=["example", "check", "no-checks", "samples", "seed", "tol-key", "tol-value", "format", "extra-field"],
)
def test_invalid_configurations_raise_config_error(fields):
    with pytest.raises(ConfigError):
        RunConfig.build(**fields)


def test_output_path_is_not_part_of_the_report():
    cfg = make_config(out="/tmp/report.json")
    assert "out" not in cfg.model_dump()


def test_status_follows_the_tolerance():
    cfg = make_config()
    good, bad = CheckResult("moment-identities"), CheckResult("weyl-intersection")
    good.record(1e-12, sample=0)
    bad.record(1e-3, sample=4)
    ok = CheckReport.from_result(good, cfg, 1e-8)
    failed = CheckReport.from_result(bad, cfg, 1e-6)
    assert ok.status == "pass" and ok.reproduction is None
    assert failed.status == "fail"
    assert failed.reproduction.sample_index == 4
    assert (failed.reproduction.seed, failed.reproduction.samples) == (7, 5)


def test_degraded_and_errored_results():
    cfg = make_config()
    degraded = CheckResult("surjectivity-certificate", extra={"degraded": "not a linear representation"})
    assert CheckReport.from_result(degraded, cfg, 1e-12).status == "degraded"
    crashed = CheckResult("weyl-intersection", max_residual=float("inf"))
    report = CheckReport.from_result(crashed, cfg, 1e-6, error="ConvergenceError: did not converge")
    assert report.status == "fail"
    assert report.error.startswith("ConvergenceError")


def build_report(timings=False):
    cfg = make_config(timings=timings)
    passing = CheckResult("moment-identities")
    passing.record(1e-12, sample=0)
    failing = CheckResult("weyl-intersection")
    failing.record(0.5, sample=2)
    reports = [
        CheckReport.from_result(passing, cfg, 1e-8, wall_time=0.25),
        CheckReport.from_result(failing, cfg, 1e-6, wall_time=0.5),
    ]
    return RunReport(config=cfg, library_version="0.1.0", calibration=calibration(), reports=reports)


def test_exit_code_reflects_failures():
    report = build_report()
    assert [r.check for r in report.failed] == ["weyl-intersection"]
    assert report.exit_code == 1


def test_ambiguous_calibration_fails_even_when_checks_pass():
    cfg = make_config(checks=["moment-identities"])
    passing = CheckResult("moment-identities")
    passing.record(1e-12, sample=0)
    ambiguous = calibration().model_copy(update={"curvature_slot_choice": None, "unique": False})
    report = RunReport(
        config=cfg,
        library_version="0.1.0",
        calibration=ambiguous,
        reports=[CheckReport.from_result(passing, cfg, 1e-8)],
    )
    assert report.failed == []
    assert report.exit_code == 1
    assert "(unique: False)" in report.to_markdown()


def test_json_is_sorted_and_omits_timings_by_default():
    text = build_report().to_json()
    data = json.loads(text)
    assert text.endswith("\n")
    assert list(data) == sorted(data)
    assert all("wall_time" not in r for r in data["reports"])
    assert data["config"]["seed"] == 7
    assert build_report().to_json() == text


def test_json_keeps_timings_when_asked():
    data = json.loads(build_report(timings=True).to_json())
    assert data["reports"][0]["wall_time"] == 0.25


def test_markdown_lists_failures_with_a_reproduction_command():
    text = build_report().to_markdown()
    assert text.startswith("# verify report: so2-r2")
    assert "| weyl-intersection | fail |" in text
    assert "verify --example so2-r2 --check weyl-intersection --seed 7 --samples 5" in text


def test_render_follows_the_format():
    assert build_report().render().startswith("{")
