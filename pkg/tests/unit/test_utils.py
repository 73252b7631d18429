import json
from fractions import Fraction

import numpy as np

from polarsym.numcore import DualScalar
from polarsym.utils import CheckResult, derive_seed, make_rng, to_jsonable


def test_derived_seeds_are_stable_and_label_dependent():
    assert derive_seed(42, "so2-r2:moment") == derive_seed(42, "so2-r2:moment")
    assert derive_seed(42, "so2-r2:moment") != derive_seed(42, "so2-r2:slice")
    assert derive_seed(42, "a") != derive_seed(43, "a")


def test_make_rng_reproduces_streams():
    a = make_rng(7, "x").normal(size=3)
    b = make_rng(7, "x").normal(size=3)
    assert np.array_equal(a, b)


def test_to_jsonable_handles_numeric_types():
    value = {
        "array": np.array([1.0, 2.0]),
        "int": np.int64(3),
        "frac": Fraction(1, 3),
        "whole": Fraction(4, 2),
        "inf": float("inf"),
        "tuple": (1, 2),
    }
    out = to_jsonable(value)
    assert out == {"array": [1.0, 2.0], "int": 3, "frac": "1/3", "whole": 2, "inf": "inf", "tuple": [1, 2]}
    json.dumps(out)


def test_to_jsonable_drops_dual_parts():
    assert to_jsonable(DualScalar(2.5, [1.0, 0.0])) == 2.5


def test_check_result_keeps_the_worst_case():
    r = CheckResult("demo")
    r.record(1e-9, sample=0)
    r.record(1e-3, sample=1)
    r.record(1e-6, sample=2)
    assert r.max_residual == 1e-3
    assert r.worst_case == {"sample": 1}
    assert r.sample_count == 3
    assert not r.passed(1e-4)
    assert r.passed(1e-2)


def test_non_finite_residuals_become_infinite():
    r = CheckResult("demo")
    r.record(float("nan"), sample=0)
    assert r.max_residual == float("inf")


def test_merge_prefixes_extra_and_tracks_parts():
    outer, inner = CheckResult("outer"), CheckResult("inner")
    outer.record(1e-10, sample=0)
    inner.record(1e-4, sample=5)
    inner.extra["dim"] = 2
    outer.merge(inner, "inner_")
    assert outer.max_residual == 1e-4
    assert outer.worst_case == {"part": "inner_", "sample": 5}
    assert outer.extra == {"inner_dim": 2, "inner_max_residual": 1e-4}
    assert outer.sample_count == 2
