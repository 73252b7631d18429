import numpy as np
import pytest

from polarsym.geometry import euclidean
from polarsym.liegroups import (
    adjoint_matrix,
    generator_field,
    group_exp,
    haar_sample,
    hat,
    isotropy_algebra,
    linear_action,
    rotation,
    so2,
    so3,
    torus,
    vee,
)
from polarsym.numcore import dual_jacobian, primal
from polarsym.sasaki import BundleKind, BundlePoint


@pytest.fixture
def rng():
    return np.random.default_rng(3)


def so3_on_r3():
    return linear_action(so3(), euclidean(3), lambda g: g, name="SO(3) on R3")


def test_so3_basis_satisfies_the_bracket_relation():
    Lx, Ly, Lz = so3().algebra_basis
    assert np.allclose(Lx @ Ly - Ly @ Lx, Lz)
    assert np.allclose(Lx, hat([1.0, 0.0, 0.0]))
    assert np.allclose(vee(hat([0.2, -1.0, 3.0])), [0.2, -1.0, 3.0])


def test_group_exp_of_so2_generator_is_a_rotation():
    g = group_exp(so2().basis_element(0), np.pi / 2)
    assert np.allclose(g.matrix, rotation(np.pi / 2))


def test_group_exp_is_differentiable_in_time():
    X = so3().algebra([0.3, -0.1, 0.7])
    _, jac = dual_jacobian(lambda t: group_exp(X, t[0]).matrix, [0.0])
    assert np.allclose(primal(jac)[:, :, 0], X.matrix)


@pytest.mark.parametrize("group", [so2(), so3(), torus(2)], ids=lambda g: g.name)
def test_haar_samples_satisfy_group_relations(group, rng):
    for _ in range(5):
        assert haar_sample(group, rng).relation_residual() < 1e-12


def test_torus_rejects_matrices_mixing_blocks():
    mixing = np.eye(4)[[2, 1, 0, 3]]
    mixing[0] *= -1
    assert torus(2).relation_residual(mixing) > 0.5


def test_generator_field_of_rotation():
    action = linear_action(so2(), euclidean(2), lambda g: g)
    assert np.allclose(primal(generator_field(action, so2().basis_element(0), [1.0, 0.0])), [0.0, 1.0])


def test_isotropy_of_a_nonzero_vector_is_the_rotation_about_it():
    basis = isotropy_algebra(so3_on_r3(), [0.0, 0.0, 2.0])
    assert len(basis) == 1
    assert abs(abs(basis[0].coefficients[2]) - 1.0) < 1e-10
    assert len(isotropy_algebra(so3_on_r3(), [0.0, 0.0, 0.0])) == 3


def test_adjoint_of_so3_is_the_rotation_itself(rng):
    g = haar_sample(so3(), rng)
    assert np.allclose(adjoint_matrix(g), g.matrix)


def test_cotangent_lift_preserves_the_pairing(rng):
    action = so3_on_r3()
    g = haar_sample(so3(), rng)
    x, xi, v = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
    moved = action.lift(g, BundlePoint(x, xi, BundleKind.COTANGENT))
    pushed_v = primal(action.differential(g, x)) @ v
    assert float(primal(moved.fiber) @ pushed_v) == pytest.approx(float(xi @ v))


def test_action_is_isometric_and_composes(rng):
    action = so3_on_r3()
    g, h = haar_sample(so3(), rng), haar_sample(so3(), rng)
    x = rng.normal(size=3)
    assert action.isometry_residual(g, x) < 1e-12
    assert action.composition_residual(g, h, x) < 1e-12
