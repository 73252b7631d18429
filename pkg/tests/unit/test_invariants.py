from fractions import Fraction

import numpy as np
import pytest

from polarsym.errors import ConfigError, ExtensionError, NonLinearActionError, PreconditionError
from polarsym.hamilton import ObservableFn
from polarsym.invariants import (
    builtin_basis,
    certify_surjectivity,
    check_exact_poisson,
    check_poisson_restriction,
    cotangent_observables,
    dump_generator_file,
    extend_invariant,
    intertwining_residual,
    load_generator_file,
    restrict_poly,
    reynolds_finite,
    section_variables,
    symmetrized_monomials,
    vanishing_ideal_residual,
)
from polarsym.polynomials import MultiPoly
from polarsym.polar import compute_weyl_group
from polarsym.zoo import get_example


@pytest.fixture
def rng():
    return np.random.default_rng(31)


@pytest.fixture(scope="module")
def so3_adj():
    return get_example("so3-adj")


@pytest.fixture(scope="module")
def so3_sym0():
    return get_example("so3-sym0")


@pytest.mark.parametrize("name", ["so2-r2", "so3-adj", "so3-sym0", "torus-c2"])
@pytest.mark.parametrize("m", [1, 2])
def test_builtin_lists_restrict_to_weyl_invariants(name, m):
    ps = get_example(name)
    basis = builtin_basis(ps, m)
    assert basis.m == m
    assert intertwining_residual(ps, basis) == 0


def test_builtin_lists_need_a_linear_example():
    with pytest.raises(NonLinearActionError):
        builtin_basis(get_example("s1-s2"), 1)
    with pytest.raises(ConfigError):
        builtin_basis(get_example("torus-c3"), 1)


def test_sym0_certificates_pass_up_to_degree_four(so3_sym0):
    basis = builtin_basis(so3_sym0, 1)
    weyl = compute_weyl_group(so3_sym0)
    for degree in range(0, 5):
        cert = certify_surjectivity(so3_sym0, 1, basis, degree, weyl)
        assert cert.passed, cert.as_dict()
    assert certify_surjectivity(so3_sym0, 1, basis, 1, weyl).target_dim == 0


def test_plane_pair_certificates_pass_up_to_degree_four():
    ps = get_example("so2-r2")
    basis = builtin_basis(ps, 2)
    weyl = compute_weyl_group(ps)
    assert all(certify_surjectivity(ps, 2, basis, d, weyl).passed for d in range(5))
    assert restrict_poly(basis.generator("moment"), ps).is_zero()


def test_dropping_the_mixed_generator_breaks_degree_two(so3_adj):
    basis = builtin_basis(so3_adj, 2).without("xy")
    cert = certify_surjectivity(so3_adj, 2, basis, 2)
    assert not cert.passed
    assert cert.target_dim == 3
    assert cert.achieved_dim == 2
    assert len(cert.missing) == 1
    assert cert.as_dict()["passed"] is False


def test_certificate_beyond_the_degree_bound_is_refused(so3_adj):
    basis = builtin_basis(so3_adj, 2)
    with pytest.raises(PreconditionError):
        certify_surjectivity(so3_adj, 2, basis, basis.degree_bound + 1)


def test_extension_of_the_mixed_product(so3_adj):
    basis = builtin_basis(so3_adj, 2)
    a1, b1 = MultiPoly.gens(section_variables(1, 2))
    assert extend_invariant(so3_adj, 2, a1 * b1, basis) == basis.generator("xy")


def test_extension_of_a_squared_generator(so3_sym0):
    basis = builtin_basis(so3_sym0, 1)
    trA2 = basis.generator("trA2")
    f = restrict_poly(trA2, so3_sym0) ** 2
    F = extend_invariant(so3_sym0, 1, f, basis)
    assert F == trA2**2
    assert restrict_poly(F, so3_sym0) == f


def test_extension_fails_for_a_non_invariant(so3_adj):
    basis = builtin_basis(so3_adj, 2)
    a1, _ = MultiPoly.gens(section_variables(1, 2))
    with pytest.raises(ExtensionError):
        extend_invariant(so3_adj, 2, a1, basis)


def test_symmetrized_monomials_extend(so3_sym0):
    basis = builtin_basis(so3_sym0, 1)
    for f in symmetrized_monomials(so3_sym0, 1, 3):
        assert restrict_poly(extend_invariant(so3_sym0, 1, f, basis), so3_sym0) == f


def test_reynolds_operator_on_the_plane():
    ps = get_example("so2-r2")
    (a1,) = MultiPoly.gens(section_variables(1, 1))
    weyl = compute_weyl_group(ps)
    assert reynolds_finite(a1, weyl).is_zero()
    assert reynolds_finite(a1**2, weyl) == a1**2
    assert reynolds_finite(a1**3 + a1**2, [[[Fraction(-1)]], [[Fraction(1)]]]) == a1**2


def test_exact_poisson_restriction_vanishes(so3_adj):
    result = check_exact_poisson(so3_adj, builtin_basis(so3_adj, 2))
    assert result.sample_count == 3
    assert result.max_residual == 0.0


def test_numeric_poisson_restriction_on_the_sphere(rng):
    ps = get_example("s1-s2")
    height, polar, kinetic, _ = ps.invariants
    result = check_poisson_restriction(ps, [(height, polar), (height, kinetic), (polar, kinetic)], 10, rng)
    assert result.max_residual < 1e-6


def test_numeric_poisson_restriction_rejects_non_invariant_observables(rng):
    ps = get_example("s1-s2")
    longitude = ObservableFn("cos-longitude", lambda x, xi: np.cos(x[1]))
    with pytest.raises(PreconditionError):
        check_poisson_restriction(ps, [(longitude, ps.invariants[0])], 3, rng)


def test_cotangent_observables_come_from_the_pair_generators(so3_adj):
    names = [F.name for F in cotangent_observables(so3_adj)]
    assert names == ["xx", "xy", "yy"]


def test_vanishing_combination_restricts_to_zero(so3_adj, rng):
    residual, found, exact_zero = vanishing_ideal_residual(so3_adj, builtin_basis(so3_adj, 2), 30, rng)
    assert found >= 1
    assert residual < 1e-8
    assert exact_zero == []


def test_generator_file_round_trip(tmp_path, so3_adj):
    basis = builtin_basis(so3_adj, 2)
    path = tmp_path / "copy.txt"
    path.write_text(dump_generator_file(basis), encoding="utf-8")
    again = load_generator_file(path)
    assert again.names == basis.names
    assert again.generators == basis.generators


@pytest.mark.parametrize(
    "text",
    [
        "group: g\nm: 1\nvariables: x1,x2\nn = 2,0:1\n",
        "group: g\nm: 1\ndegree_bound: 2\nvariables: x1,x2\nbad = 2,0:1 1,0:1\n",
        "group: g\nm: one\ndegree_bound: 2\nvariables: x1,x2\n",
        "group: g\nm: 1\ndegree_bound: 2\nvariables: x1,x2\nn = 2,0:1\nn = 0,2:1\n",
    ],
    ids=["missing-bound", "inhomogeneous", "bad-integer", "duplicate-name"],
)
def test_malformed_generator_files(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_generator_file(path)
