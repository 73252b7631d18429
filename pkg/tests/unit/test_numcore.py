import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarsym.errors import DomainViolationError, EmptySystemError
from polarsym.numcore import (
    DualScalar,
    atan2,
    dual_gradient,
    dual_jacobian,
    finite_diff_jacobian,
    least_squares,
    mat_inv,
    metric_complement,
    metric_orthonormal_basis,
    null_space,
    numerical_rank,
    pack,
    primal,
    span_residual,
)

coords = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


def smooth(x):
    return x[0] ** 3 * x[1] - np.sin(x[0] * x[1]) + np.exp(x[1]) / (2.0 + x[0] * x[0])


def test_dual_gradient_of_polynomial_is_exact():
    grad = dual_gradient(lambda x: x[0] ** 2 * x[1] + 3 * x[1], [2.0, -1.0])
    assert grad.tolist() == [-4.0, 7.0]


@settings(max_examples=50, deadline=None)
@given(coords, coords)
def test_dual_gradient_matches_central_differences(a, b):
    exact = dual_gradient(smooth, [a, b])
    approx = finite_diff_jacobian(smooth, [a, b]).ravel()
    assert np.allclose(exact, approx, atol=1e-6)


def test_nested_differentiation_gives_second_derivative():
    def first(y):
        return dual_jacobian(lambda z: z[0] ** 3, y)[1][0]

    _, second = dual_jacobian(first, [2.0])
    assert float(primal(second[0])) == pytest.approx(12.0)


def test_dual_jacobian_of_vector_function_has_output_by_input_shape():
    value, jac = dual_jacobian(lambda x: pack([x[0] * x[1], x[0] + x[1], x[1] * x[1]]), [1.0, 2.0])
    assert primal(value).tolist() == [2.0, 3.0, 4.0]
    assert primal(jac).tolist() == [[2.0, 1.0], [1.0, 1.0], [0.0, 4.0]]


def test_atan2_derivative_matches_angle_rate():
    grad = dual_gradient(lambda p: atan2(p[1], p[0]), [1.0, 1.0])
    assert np.allclose(grad, [-0.5, 0.5])
    assert atan2(1.0, 0.0) == pytest.approx(math.pi / 2)


def test_non_finite_derivative_is_a_domain_violation():
    with pytest.raises(DomainViolationError):
        dual_gradient(lambda x: x[0] ** 0.5, [0.0])


@pytest.mark.parametrize(
    "f, x",
    [
        (lambda x: np.log(x[0]), [-1.0]),
        (lambda x: np.log(x[0]), [0.0]),
        (lambda x: np.sqrt(x[0]), [-0.25]),
        (lambda x: x[0] ** 1.5, [-2.0]),
        (lambda x: np.arccos(x[0]), [1.5]),
    ],
    ids=["log-negative", "log-zero", "sqrt-negative", "fractional-power", "arccos"],
)
def test_out_of_domain_elementary_functions_raise(f, x):
    with pytest.raises(DomainViolationError):
        dual_gradient(f, x)


def test_non_finite_value_is_a_domain_violation():
    with pytest.raises(DomainViolationError):
        dual_gradient(lambda x: x[0] * float("nan"), [1.0])


def test_dual_scalar_comparisons_use_the_value():
    d = DualScalar(1.5, [1.0])
    assert d > 1.0 and d < 2.0
    assert abs(DualScalar(-2.0, [1.0])).value == 2.0


def test_finite_difference_step_must_be_positive():
    with pytest.raises(ValueError):
        finite_diff_jacobian(smooth, [0.0, 0.0], step=0.0)


def test_least_squares_reports_residual_and_rank():
    A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    b = np.array([1.0, 1.0, 0.0])
    rep = least_squares(A, b)
    assert rep.rank == 2
    assert rep.residual_norm == pytest.approx(float(np.linalg.norm(A @ rep.solution - b)), abs=1e-12)


def test_least_squares_rejects_empty_system():
    with pytest.raises(EmptySystemError):
        least_squares(np.zeros((3, 0)), np.zeros(3))


def test_null_space_and_rank():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    K = null_space(A)
    assert K.shape == (3, 2)
    assert np.allclose(A @ K, 0.0)
    assert numerical_rank(A) == 1


def test_metric_complement_is_gram_orthogonal():
    gram = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 1.0]])
    v = np.array([[1.0], [0.0], [0.0]])
    C = metric_complement(v, gram)
    assert C.shape == (3, 2)
    assert np.allclose(v.T @ gram @ C, 0.0)
    assert np.allclose(C.T @ gram @ C, np.eye(2))


def test_span_residual_detects_vectors_outside_a_span():
    gram = np.eye(3)
    basis = metric_orthonormal_basis(np.array([[1.0], [0.0], [0.0]]), gram)
    assert span_residual(np.array([[3.0], [0.0], [0.0]]), basis, gram) == pytest.approx(0.0, abs=1e-12)
    assert span_residual(np.array([[1.0], [2.0], [0.0]]), basis, gram) == pytest.approx(2.0)


def test_mat_inv_differentiates_through_dual_entries():
    # d/dt (1/(2+t)) at t=0 is -1/4
    def entry(t):
        M = np.array([[2.0 + t[0], 0.0], [0.0, 1.0]], dtype=object)
        return mat_inv(M)[0, 0]

    assert dual_gradient(entry, [0.0])[0] == pytest.approx(-0.25)
