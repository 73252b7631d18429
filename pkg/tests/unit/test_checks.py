import pytest

from polarsym.checks import SUITES, CheckContext, resolve_checks, run_calibration
from polarsym.config import CHECK_NAMES, Settings
from polarsym.errors import ConfigError
from polarsym.zoo import get_example


def context(name, samples=4, seed=3):
    settings = Settings()
    return CheckContext(ps=get_example(name, settings), settings=settings, samples=samples, seed=seed)


def test_suites_cover_every_check_name_in_order():
    assert tuple(SUITES) == CHECK_NAMES


def test_resolve_checks_expands_all_and_keeps_order():
    assert resolve_checks(["weyl-intersection", "all"])[:2] == ["weyl-intersection", "moment-identities"]
    assert len(resolve_checks(["all", "all"])) == len(CHECK_NAMES)
    with pytest.raises(ConfigError):
        resolve_checks(["nope"])


def test_context_streams_depend_on_example_and_label():
    a, b = context("so2-r2"), context("so3-adj")
    assert a.rng("x").integers(1 << 30) == context("so2-r2").rng("x").integers(1 << 30)
    assert a.rng("x").integers(1 << 30) != a.rng("y").integers(1 << 30)
    assert a.rng("x").integers(1 << 30) != b.rng("x").integers(1 << 30)


@pytest.mark.slow
@pytest.mark.parametrize("check", CHECK_NAMES)
def test_every_suite_passes_on_the_plane(check):
    result = SUITES[check](context("so2-r2"))
    assert "degraded" not in result.extra
    assert result.sample_count > 0
    assert result.passed(Settings().tolerance(check)), (result.max_residual, result.worst_case)


def test_suites_are_deterministic():
    first = SUITES["project-covector"](context("so3-adj"))
    second = SUITES["project-covector"](context("so3-adj"))
    assert first.max_residual == second.max_residual
    assert first.worst_case == second.worst_case


def test_section_suite_reports_the_weyl_order():
    result = SUITES["section-orthogonality"](context("so3-sym0"))
    assert result.extra["weyl_order"] == 6
    assert "slice_polarity_max_residual" in result.extra


def test_weyl_intersection_counts_on_the_plane():
    result = SUITES["weyl-intersection"](context("so2-r2"))
    assert result.extra["intersection_points"] == [2, 2]
    assert result.extra["weyl_order"] == 2


def test_symplectic_slice_on_the_adjoint_representation():
    result = SUITES["symplectic-slice"](context("so3-adj"))
    assert result.extra["first_point_dims"]["orbit"] == 2
    assert result.extra["first_point_dims"]["V"] == 2
    assert result.passed(Settings().tolerance("symplectic-slice"))


def test_certificates_degrade_on_the_sphere():
    result = SUITES["surjectivity-certificate"](context("s1-s2"))
    assert "degraded" in result.extra
    assert result.sample_count == 0


def test_certificates_degrade_without_generator_files():
    assert "degraded" in SUITES["surjectivity-certificate"](context("torus-c3")).extra


def test_surjectivity_records_certificates_and_extensions():
    result = SUITES["surjectivity-certificate"](context("so3-adj"))
    assert result.max_residual == 0.0
    assert {c["m"] for c in result.extra["certificates"]} == {1, 2}
    assert result.extra["extended_invariants"] > 0
    assert "note" not in result.extra


def test_poisson_restriction_on_the_sphere_uses_its_invariants():
    result = SUITES["poisson-restriction"](context("s1-s2"))
    assert "exact_max_residual" not in result.extra
    assert result.passed(Settings().tolerance("poisson-restriction"))


def test_calibration_is_unique():
    calibration = run_calibration(Settings(calibration_samples=6), seed=1)
    assert calibration.unique
    assert calibration.choice is not None
