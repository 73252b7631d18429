import math

import numpy as np
import pytest

import polarsym.geometry as geometry
from polarsym.errors import ChartDomainError, ChartExitError, NotTangentError
from polarsym.geometry import (
    Submanifold,
    christoffel,
    christoffel_fd,
    euclidean,
    geodesic_flow,
    killing_residual,
    riemann,
    round_sphere,
    second_fundamental_form,
)
from polarsym.numcore import pack, primal


@pytest.fixture
def sphere():
    return round_sphere(1e-2)


def test_sphere_christoffel_symbols(sphere):
    theta = 1.0
    gamma = primal(christoffel(sphere, [theta, 0.3]))
    assert gamma[0, 1, 1] == pytest.approx(-math.sin(theta) * math.cos(theta))
    assert gamma[1, 0, 1] == pytest.approx(math.cos(theta) / math.sin(theta))
    assert gamma[1, 1, 0] == pytest.approx(gamma[1, 0, 1])


def test_christoffel_dual_and_finite_differences_agree(sphere):
    x = [0.7, -2.0]
    assert np.allclose(primal(christoffel(sphere, x)), christoffel_fd(sphere, x), atol=1e-8)


def test_flat_space_has_no_connection_or_curvature():
    m = euclidean(3)
    assert not np.any(christoffel(m, [1.0, 2.0, 3.0]))
    assert not np.any(riemann(m, [1.0, 2.0, 3.0]).components)


def test_sphere_has_unit_sectional_curvature(sphere):
    x = np.array([1.1, 0.4])
    R = riemann(sphere, x)
    u, v = np.array([1.0, 0.0]), np.array([0.3, 1.0])
    assert R.sectional(sphere.metric(x), u, v) == pytest.approx(1.0, abs=1e-10)
    assert R.antisymmetry_residual() < 1e-12
    assert R.bianchi_residual() < 1e-12


def test_outside_the_chart_is_rejected(sphere):
    with pytest.raises(ChartDomainError):
        christoffel(sphere, [0.0, 0.0])


def test_periodic_difference_wraps_longitude(sphere):
    d = sphere.difference([1.0, 3.1], [1.0, -3.1])
    assert d[1] == pytest.approx(6.2 - 2 * math.pi)


def test_equator_is_a_geodesic(sphere):
    x, v = geodesic_flow(sphere, [math.pi / 2, 0.0], [0.0, 1.0], 1.0)
    assert x[0] == pytest.approx(math.pi / 2, abs=1e-10)
    assert x[1] == pytest.approx(1.0, abs=1e-10)
    assert v[1] == pytest.approx(1.0, abs=1e-10)


def test_geodesic_leaving_the_chart_reports_exit_time(sphere):
    with pytest.raises(ChartExitError) as info:
        geodesic_flow(sphere, [0.5, 0.0], [-1.0, 0.0], 1.0)
    assert 0.45 < info.value.exit_time < 0.5


def test_repeated_energy_rejections_settle_at_the_smallest_step(sphere):
    strict = geodesic_flow(sphere, [1.0, 0.0], [0.3, 0.5], 1e-3, energy_tol=0.0)
    loose = geodesic_flow(sphere, [1.0, 0.0], [0.3, 0.5], 1e-3)
    assert np.allclose(strict[0], loose[0], atol=1e-9)
    assert np.allclose(strict[1], loose[1], atol=1e-9)


def test_stage_outside_the_chart_is_a_chart_exit(sphere, monkeypatch):
    def outside(m, x, v, h):
        raise ChartDomainError([0.0, 0.0], m.name)

    monkeypatch.setattr(geometry, "_rk4", outside)
    with pytest.raises(ChartExitError) as info:
        geodesic_flow(sphere, [1.0, 0.0], [0.3, 0.5], 1.0)
    assert info.value.exit_time == 0.0


def test_killing_residual_of_rotation_and_dilation():
    m = euclidean(2)
    u, v = np.array([1.0, 0.5]), np.array([-0.2, 2.0])
    rotation = lambda y: pack([-y[1], y[0]])  # noqa: E731
    stretch = lambda y: pack([y[0], 0.0 * y[1]])  # noqa: E731
    assert abs(killing_residual(m, [0.3, 0.4], rotation, u, v)) < 1e-14
    e1 = np.array([1.0, 0.0])
    assert killing_residual(m, [0.3, 0.4], stretch, e1, e1) == pytest.approx(2.0)


def line_in_plane():
    return Submanifold(
        name="x-axis",
        ambient=euclidean(2),
        dim=1,
        param=lambda s: pack([s[0], 0.0 * s[0]]),
        locate=lambda x: np.array([x[0]]),
    )


def test_submanifold_distance_and_projection():
    line = line_in_plane()
    assert line.distance([1.0, 3.0]) == pytest.approx(3.0)
    assert np.allclose(line.tangent_projection([1.0, 0.0], np.array([2.0, 5.0])), [2.0, 0.0])


def test_flat_line_is_totally_geodesic_and_rejects_normals():
    line = line_in_plane()
    x = np.array([0.5, 0.0])
    e1 = np.array([1.0, 0.0])
    assert np.allclose(second_fundamental_form(line, x, e1, e1), 0.0)
    with pytest.raises(NotTangentError):
        second_fundamental_form(line, x, e1, np.array([0.0, 1.0]))
