import json

import pytest
import typer
from typer.testing import CliRunner

import polarsym.cli as cli
from polarsym.errors import ConfigError, ConvergenceError
from polarsym.sasaki import SlotCalibration
from polarsym.utils import CheckResult


def fake_calibration(settings, seed):
    return SlotCalibration(choice=(0, 1, 2), unique=True, slot_residuals={}, formula_residuals={}, samples=0)


def passing_suite(ctx):
    result = CheckResult("moment-identities")
    result.record(1e-14, sample=0)
    return result


def failing_suite(ctx):
    result = CheckResult("weyl-intersection")
    result.record(1e-9, sample=0)
    result.record(0.25, sample=3)
    return result


def crashing_suite(ctx):
    raise ConvergenceError("slice step did not reach the section", 0.5, 10)


def misconfigured_suite(ctx):
    raise ConfigError("no generator list")


def run_main(**overrides):
    kwargs = dict(
        example="so2-r2",
        check=["moment-identities"],
        samples=3,
        seed=11,
        tol=[],
        out=None,
        format="json",
        timings=False,
        verbose=False,
    )
    kwargs.update(overrides)
    with pytest.raises(typer.Exit) as info:
        cli.main(**kwargs)
    return info.value.exit_code


def report_from(out):
    return json.loads(out[out.index("\n{") + 1 : out.rindex("\n}") + 2])


@pytest.fixture
def fake_suites(monkeypatch):
    monkeypatch.setattr(cli, "run_calibration", fake_calibration)
    monkeypatch.setitem(cli.SUITES, "moment-identities", passing_suite)
    monkeypatch.setitem(cli.SUITES, "weyl-intersection", failing_suite)
    monkeypatch.setitem(cli.SUITES, "project-covector", crashing_suite)
    monkeypatch.setitem(cli.SUITES, "symplectic-slice", misconfigured_suite)


def test_passing_run_exits_zero(fake_suites, capsys):
    assert run_main() == 0
    out = capsys.readouterr().out
    assert "verify so2-r2 (seed 11)" in out
    report = report_from(out)
    assert report["reports"][0]["status"] == "pass"
    assert report["calibration"]["curvature_slot_choice"] == [0, 1, 2]


def test_failing_check_exits_one_with_reproduction(fake_suites, capsys):
    assert run_main(check=["moment-identities", "weyl-intersection"]) == 1
    out = capsys.readouterr().out
    failed = report_from(out)["reports"][1]
    assert failed["status"] == "fail"
    assert failed["reproduction"] == {
        "example": "so2-r2",
        "check": "weyl-intersection",
        "seed": 11,
        "samples": 3,
        "sample_index": 3,
    }
    assert "1 check(s) failed" in out


def test_ambiguous_calibration_fails_the_run(fake_suites, monkeypatch, capsys):
    def ambiguous(settings, seed):
        return SlotCalibration(choice=None, unique=False, slot_residuals={"R(a,b)c": 0.3}, formula_residuals={}, samples=2)

    monkeypatch.setattr(cli, "run_calibration", ambiguous)
    assert run_main() == 1
    out = capsys.readouterr().out
    report = report_from(out)
    assert report["reports"][0]["status"] == "pass"
    assert report["calibration"]["unique"] is False
    assert "did not single out one ordering" in out


def test_calibrated_slots_reach_the_checks(fake_suites, monkeypatch, capsys):
    seen = []

    def recording_suite(ctx):
        seen.append(tuple(ctx.slots))
        return passing_suite(ctx)

    monkeypatch.setattr(
        cli,
        "run_calibration",
        lambda settings, seed: SlotCalibration(choice=(2, 0, 1), unique=True, slot_residuals={}, formula_residuals={}, samples=0),
    )
    monkeypatch.setitem(cli.SUITES, "moment-identities", recording_suite)
    assert run_main() == 0
    assert seen == [(2, 0, 1)]


def test_raising_check_is_reported_as_failed(fake_suites, capsys):
    assert run_main(check=["project-covector"]) == 1
    failed = report_from(capsys.readouterr().out)["reports"][0]
    assert failed["error"].startswith("ConvergenceError")
    assert failed["max_residual"] == "inf"


def test_tolerance_override_can_turn_a_failure_into_a_pass(fake_suites, capsys):
    assert run_main(check=["weyl-intersection"], tol=["weyl-intersection=1.0"]) == 0
    assert report_from(capsys.readouterr().out)["reports"][0]["tolerance"] == 1.0


@pytest.mark.parametrize(
    "overrides",
    [
        {"example": "klein-bottle"},
        {"check": ["no-such-check"]},
        {"tol": ["weyl-intersection"]},
        {"tol": ["bogus=1"]},
        {"samples": 0},
        {"format": "xml"},
        {"example": "torus-c0"},
        {"check": ["symplectic-slice"]},
    ],
    ids=["example", "check", "tol-syntax", "tol-key", "samples", "format", "torus-size", "config-in-check"],
)
def test_configuration_errors_exit_two(fake_suites, capsys, overrides):
    assert run_main(**overrides) == 2
    assert "configuration error" in capsys.readouterr().out


def test_markdown_report_written_to_file(fake_suites, tmp_path, capsys):
    target = tmp_path / "report.md"
    assert run_main(check=["weyl-intersection"], out=target, format="md") == 1
    text = target.read_text(encoding="utf-8")
    assert text.startswith("# verify report: so2-r2")
    assert "--check weyl-intersection --seed 11 --samples 3" in text
    assert "report written to" in capsys.readouterr().out


def test_timings_are_opt_in(fake_suites, capsys):
    run_main(timings=True)
    assert "wall_time" in report_from(capsys.readouterr().out)["reports"][0]


@pytest.mark.slow
def test_same_seed_gives_identical_report_files(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for target in (first, second):
        code = run_main(example="s1-s2", check=["totally-geodesic-tsigma"], samples=5, seed=7, out=target)
        assert code == 0
    assert first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text(encoding="utf-8"))
    assert report["calibration"]["unique"] is True
    assert report["reports"][0]["check"] == "totally-geodesic-tsigma"


def test_command_line_entry_point(fake_suites):
    app = typer.Typer()
    app.command()(cli.main)
    result = CliRunner().invoke(app, ["--example", "so2-r2", "--check", "moment-identities", "--samples", "2"])
    assert result.exit_code == 0
    assert '"status": "pass"' in result.output
    result = CliRunner().invoke(app, ["--example", "nowhere"])
    assert result.exit_code == 2
