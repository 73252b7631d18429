import pytest

from polarsym.config import CHECK_NAMES, Settings, default_tolerances, parse_tolerance_overrides
from polarsym.errors import ConfigError


def test_settings_validate_ok():
    Settings().validate()


def test_settings_validate_rejects_non_positive_samples():
    with pytest.raises(ValueError):
        Settings(samples=0).validate()


def test_settings_validate_rejects_non_positive_tolerance():
    tolerances = default_tolerances()
    tolerances["weyl-intersection"] = 0.0
    with pytest.raises(ValueError):
        Settings(tolerances=tolerances).validate()


def test_every_check_has_a_default_tolerance():
    assert set(default_tolerances()) == set(CHECK_NAMES)
    assert Settings().tolerance("surjectivity-certificate") == 1e-12


def test_overrides_replace_only_named_keys():
    s = Settings().with_overrides({"poisson-restriction": 1e-3})
    assert s.tolerance("poisson-restriction") == 1e-3
    assert s.tolerance("moment-identities") == 1e-8
    assert Settings().tolerance("poisson-restriction") == 1e-6


def test_unknown_override_key_is_a_config_error():
    with pytest.raises(ConfigError):
        Settings().with_overrides({"no-such-check": 1.0})


def test_parse_tolerance_overrides():
    assert parse_tolerance_overrides(["weyl-intersection=1e-4", " reduced-algebra = 2"]) == {
        "weyl-intersection": 1e-4,
        "reduced-algebra": 2.0,
    }


@pytest.mark.parametrize("item", ["weyl-intersection", "=1e-3", "weyl-intersection=small"])
def test_parse_tolerance_overrides_rejects_malformed_items(item):
    with pytest.raises(ConfigError):
        parse_tolerance_overrides([item])


def test_config_error_is_also_a_value_error():
    with pytest.raises(ValueError):
        Settings().with_overrides({"bogus": 1.0})
