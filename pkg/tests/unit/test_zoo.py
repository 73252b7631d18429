import numpy as np
import pytest

from polarsym.config import Settings
from polarsym.errors import ConfigError
from polarsym.liegroups import haar_sample, so3
from polarsym.numcore import primal
from polarsym.polar import compute_weyl_group
from polarsym.zoo import (
    EXAMPLE_NAMES,
    SYM0_GRAM,
    get_example,
    is_known_example,
    rotation_to_axis,
    sym0_coords,
    sym0_matrix,
    sym0_representation,
)


@pytest.fixture
def rng():
    return np.random.default_rng(17)


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_every_registered_example_builds(name):
    ps = get_example(name)
    assert ps.name == name
    assert ps.section.dim >= 1


@pytest.mark.parametrize(
    "name, order",
    [("so2-r2", 2), ("so3-adj", 2), ("so3-sym0", 6), ("torus-c2", 4), ("torus-c3", 8), ("s1-s2", 2)],
)
def test_weyl_group_orders(name, order):
    assert compute_weyl_group(get_example(name)).order == order


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_canonical_form_lands_in_the_section(name, rng):
    ps = get_example(name)
    for _ in range(5):
        x = np.asarray(ps.sample_point(rng), dtype=float)
        h, target = ps.canonicalize(x)
        moved = primal(ps.action.act(h, x))
        assert np.allclose(ps.manifold.difference(moved, target), 0.0, atol=1e-9)
        assert ps.section.distance(target) < 1e-9


def test_unknown_and_degenerate_names_are_configuration_errors():
    with pytest.raises(ConfigError):
        get_example("so4-adj")
    with pytest.raises(ConfigError):
        get_example("torus-c0")
    assert is_known_example("torus-c7")
    assert not is_known_example("torus-c")


def test_torus_files_exist_only_for_two_copies_of_c2():
    assert get_example("torus-c2").linear.generator_file(1) == "torus_c2_m1.txt"
    assert get_example("torus-c3").linear.generator_file(1) is None
    assert get_example("s1-s2").linear is None


def test_settings_margin_reaches_the_samplers(rng):
    ps = get_example("so2-r2", Settings(sample_margin=0.5))
    for _ in range(20):
        assert abs(ps.sample_section_param(rng)[0]) >= 0.5


@pytest.mark.parametrize("v", [[0.3, -1.0, 2.0], [0.0, 0.0, -4.0], [0.0, 0.0, 1.5]])
def test_rotation_to_axis(v):
    R = rotation_to_axis(np.array(v))
    assert np.allclose(R @ R.T, np.eye(3))
    assert np.linalg.det(R) == pytest.approx(1.0)
    assert np.allclose(R @ v, [0.0, 0.0, np.linalg.norm(v)])


def test_sym0_coordinates_round_trip():
    x = np.array([1.0, -2.0, 0.5, 0.25, 3.0])
    A = primal(sym0_matrix(x))
    assert np.trace(A) == 0.0
    assert np.allclose(primal(sym0_coords(A)), x)


def test_sym0_representation_is_an_isometric_homomorphism(rng):
    G = np.array(SYM0_GRAM, dtype=float)
    g, h = haar_sample(so3(), rng).matrix, haar_sample(so3(), rng).matrix
    Rg, Rh = primal(sym0_representation(g)), primal(sym0_representation(h))
    assert np.allclose(Rg.T @ G @ Rg, G)
    assert np.allclose(primal(sym0_representation(g @ h)), Rg @ Rh)


def test_sym0_gram_is_the_trace_form(rng):
    x, y = rng.normal(size=5), rng.normal(size=5)
    trace = float(np.trace(primal(sym0_matrix(x)) @ primal(sym0_matrix(y))))
    assert x @ np.array(SYM0_GRAM) @ y == pytest.approx(trace)


def test_sphere_example_rotates_longitude():
    ps = get_example("s1-s2")
    h, target = ps.canonicalize(np.array([1.0, 2.5]))
    assert np.allclose(primal(ps.action.act(h, [1.0, 2.5])), [1.0, 0.0])
    assert np.allclose(target, [1.0, 0.0])
    assert [F.name for F in ps.invariants] == ["height", "polar-momentum", "kinetic", "axial-momentum"]
