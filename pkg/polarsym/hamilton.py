"""Cotangent-lifted actions, moment maps, Hamiltonian fields and Poisson brackets.

Sign conventions: ω = Σ dx^i ∧ dξ_i and i_{X_f} ω = df, so that
X_f = (∂f/∂ξ, −∂f/∂x) and {f, g} = ω(X_f, X_g) = Σ ∂f/∂x_i ∂g/∂ξ_i − ∂f/∂ξ_i ∂g/∂x_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from polarsym.errors import SingularFormError, ZeroLevelSamplingError
from polarsym.geometry import ManifoldModel
from polarsym.liegroups import (
    Action,
    AlgebraElement,
    adjoint_matrix,
    generator_field,
    generator_matrix,
    group_exp,
    haar_sample,
)
from polarsym.numcore import FD_STEP, dual_gradient, dual_jacobian, finite_diff_jacobian, null_space, pack, primal
from polarsym.polynomials import MultiPoly
from polarsym.sasaki import (
    BundleKind,
    BundlePoint,
    BundleTangent,
    apply_J,
    from_coordinates,
    sasaki_gram,
    symplectic_form,
    symplectic_gram,
    to_coordinates,
)
from polarsym.utils import CheckResult

logger = logging.getLogger(__name__)

SINGULAR_COND = 1e12
ZERO_LEVEL_TOL = 1e-10
# relative residual allowed when solving Ω(X_f, ·) = df
HAMILTON_RTOL = 1e-9
ZERO_LEVEL_ATTEMPTS = 100

BaseSampler = Callable[[np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class MomentValue:
    """Coefficients of u(x, ξ) ∈ 𝔤* against the algebra basis."""

    coefficients: np.ndarray

    def pair(self, X: AlgebraElement) -> Any:
        return self.coefficients @ X.coefficients

    def norm(self) -> float:
        c = primal(self.coefficients)
        return float(np.linalg.norm(c)) if c.size else 0.0


@dataclass(frozen=True, eq=False)
class ObservableFn:
    """A function on T*M; ``evaluator(x, ξ)`` must accept dual numbers."""

    name: str
    evaluator: Callable[[np.ndarray, np.ndarray], Any]
    poly: Optional[MultiPoly] = None

    def __call__(self, bp: BundlePoint) -> Any:
        return self.evaluator(np.asarray(bp.base), np.asarray(bp.fiber))

    def at_coordinates(self, z: Sequence[Any]) -> Any:
        z = np.asarray(z)
        n = len(z) // 2
        return self.evaluator(z[:n], z[n:])

    @classmethod
    def from_poly(cls, poly: MultiPoly, name: str = "") -> "ObservableFn":
        def evaluate(x: np.ndarray, xi: np.ndarray) -> Any:
            return poly.eval(list(x) + list(xi))

        return cls(name or str(poly), evaluate, poly)

    @classmethod
    def constant(cls, value: float) -> "ObservableFn":
        return cls(str(value), lambda x, xi: value)

    def __add__(self, other: "ObservableFn") -> "ObservableFn":
        poly = self.poly + other.poly if self.poly is not None and other.poly is not None else None
        return ObservableFn(f"({self.name})+({other.name})", lambda x, xi: self.evaluator(x, xi) + other.evaluator(x, xi), poly)

    def __mul__(self, other: "ObservableFn") -> "ObservableFn":
        poly = self.poly * other.poly if self.poly is not None and other.poly is not None else None
        return ObservableFn(f"({self.name})*({other.name})", lambda x, xi: self.evaluator(x, xi) * other.evaluator(x, xi), poly)

    def compose(self, outer: Callable[[Any], Any], name: str) -> "ObservableFn":
        return ObservableFn(name, lambda x, xi: outer(self.evaluator(x, xi)))


def moment_map(action: Action, bp: BundlePoint) -> MomentValue:
    """u_X(x, ξ) = ⟨ξ, X*(x)⟩ for each basis element X."""
    A = generator_matrix(action, bp.base)
    return MomentValue(pack(list(np.asarray(bp.fiber) @ A)) if A.shape[1] else np.zeros(0))


def moment_component(action: Action, X: AlgebraElement) -> ObservableFn:
    def u(x: np.ndarray, xi: np.ndarray) -> Any:
        return xi @ generator_field(action, X, x)

    return ObservableFn(f"u[{X.coefficients.tolist()}]", u)


def cotangent_generator_coordinates(action: Action, X: AlgebraElement, bp: BundlePoint) -> np.ndarray:
    """X^# = X^i ∂x_i − Σ_j ∂_i X^j ξ_j ∂ξ_i in bundle coordinates."""
    Xs, DX = dual_jacobian(lambda y: generator_field(action, X, y), bp.base)
    DX = np.asarray(DX)
    vertical = -(DX.T @ np.asarray(bp.fiber))
    return pack(list(Xs) + list(vertical))


def cotangent_generator(action: Action, X: AlgebraElement, bp: BundlePoint) -> BundleTangent:
    return from_coordinates(action.manifold, bp, cotangent_generator_coordinates(action, X, bp))


def lifted_flow_velocity(action: Action, X: AlgebraElement, bp: BundlePoint) -> np.ndarray:
    """d/dt|₀ of exp(tX)·(x, ξ) under the lifted action, by dual numbers."""

    def flow(t: np.ndarray) -> np.ndarray:
        return action.lift(group_exp(X, t[0]), bp).coordinates()

    _, jac = dual_jacobian(flow, [0.0])
    return primal(np.asarray(jac)).reshape(-1)


def lifted_flow_velocity_fd(action: Action, X: AlgebraElement, bp: BundlePoint, step: float = FD_STEP) -> np.ndarray:
    def flow(t: np.ndarray) -> np.ndarray:
        return primal(action.lift(group_exp(X, float(t[0])), bp).coordinates())

    return finite_diff_jacobian(flow, [0.0], step).reshape(-1)


def _coordinate_gradient(f: ObservableFn, bp: BundlePoint) -> np.ndarray:
    return dual_gradient(f.at_coordinates, primal(bp.coordinates()))


def _solve_form(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if np.linalg.cond(gram) > SINGULAR_COND:
        raise SingularFormError("symplectic Gram matrix is singular; the chart is broken at this point")
    return np.linalg.solve(gram, rhs)


def hamiltonian_field_coordinates(m: ManifoldModel, f: ObservableFn, bp: BundlePoint) -> np.ndarray:
    """Solve Ω(X_f, ·) = df(·) against the coordinate Gram matrix of Ω."""
    omega = primal(symplectic_gram(m, bp))
    df = _coordinate_gradient(f, bp)
    X = _solve_form(omega.T, df)
    residual = float(np.linalg.norm(omega.T @ X - df))
    if residual > HAMILTON_RTOL * max(1.0, float(np.linalg.norm(df))):
        raise SingularFormError(
            f"Hamiltonian field solve left residual {residual:.3e} at {primal(bp.coordinates()).tolist()}"
        )
    return X


def hamiltonian_field(m: ManifoldModel, f: ObservableFn, bp: BundlePoint) -> BundleTangent:
    Z = from_coordinates(m, bp, hamiltonian_field_coordinates(m, f, bp))
    return BundleTangent(primal(Z.horizontal), primal(Z.vertical))


def hamiltonian_field_via_J(m: ManifoldModel, f: ObservableFn, bp: BundlePoint) -> BundleTangent:
    """X_f = −J grad_g̃ f."""
    G = primal(sasaki_gram(m, bp))
    grad = _solve_form(G, _coordinate_gradient(f, bp))
    Z = from_coordinates(m, bp, grad)
    return -apply_J(BundleTangent(primal(Z.horizontal), primal(Z.vertical)))


def poisson_bracket(m: ManifoldModel, f: ObservableFn, g: ObservableFn, bp: BundlePoint) -> float:
    Xf = hamiltonian_field(m, f, bp)
    Xg = hamiltonian_field(m, g, bp)
    return float(primal(symplectic_form(m, bp, Xf, Xg)))


def interior_product(m: ManifoldModel, bp: BundlePoint, dz: np.ndarray) -> np.ndarray:
    """Coordinate covector i_Z Ω for a coordinate vector Z."""
    return primal(symplectic_gram(m, bp)).T @ np.asarray(dz, dtype=float)


def default_base_sampler(dim: int) -> BaseSampler:
    return lambda rng: rng.normal(size=dim)


def random_cotangent_point(action: Action, rng: np.random.Generator, sample_base: Optional[BaseSampler] = None) -> BundlePoint:
    n = action.manifold.dim
    sample_base = sample_base or default_base_sampler(n)
    return BundlePoint(np.asarray(sample_base(rng), dtype=float), rng.normal(size=n), BundleKind.COTANGENT)


def check_moment_identities(
    action: Action,
    samples: int,
    rng: np.random.Generator,
    sample_base: Optional[BaseSampler] = None,
) -> CheckResult:
    """du_X = i_{X^#} Ω and u(g·p) = Ad*_g u(p) over random samples."""
    m = action.manifold
    differential = CheckResult("du-equals-contraction")
    equivariance = CheckResult("equivariance")
    for index in range(samples):
        bp = random_cotangent_point(action, rng, sample_base)
        z = primal(bp.coordinates())
        for a in range(action.group.group_dim):
            X = action.group.basis_element(a)
            du = dual_gradient(moment_component(action, X).at_coordinates, z)
            contraction = interior_product(m, bp, primal(cotangent_generator_coordinates(action, X, bp)))
            differential.record(float(np.linalg.norm(du - contraction)), sample=index, basis=a, point=z)
        g = haar_sample(action.group, rng)
        moved = action.lift(g, bp)
        lhs = primal(moment_map(action, moved).coefficients)
        rhs = adjoint_matrix(g.inverse()).T @ primal(moment_map(action, bp).coefficients)
        equivariance.record(float(np.linalg.norm(lhs - rhs)) if lhs.size else 0.0, sample=index, point=z, g=g.matrix)
    result = CheckResult("moment-identities")
    result.merge(differential, "du_")
    result.merge(equivariance, "equivariance_")
    result.sample_count = samples
    logger.info(
        "moment identities on %s: du residual %.3e, equivariance residual %.3e",
        action.name,
        differential.max_residual,
        equivariance.max_residual,
    )
    return result


def sample_zero_level(
    action: Action,
    rng: np.random.Generator,
    count: int,
    sample_base: Optional[BaseSampler] = None,
) -> list[BundlePoint]:
    """Points of u⁻¹(0): ξ drawn from the null space of ξ ↦ (⟨ξ, X_a*(x)⟩)_a."""
    n = action.manifold.dim
    sample_base = sample_base or default_base_sampler(n)
    out = []
    attempts = 0
    while len(out) < count:
        if attempts >= ZERO_LEVEL_ATTEMPTS * max(count, 1):
            raise ZeroLevelSamplingError(action.name, len(out), count, attempts)
        attempts += 1
        x = np.asarray(sample_base(rng), dtype=float)
        A = primal(generator_matrix(action, x))
        N = null_space(A.T) if A.shape[1] else np.eye(n)
        if N.shape[1] == 0:
            continue
        xi = N @ rng.normal(size=N.shape[1])
        bp = BundlePoint(x, xi, BundleKind.COTANGENT)
        if moment_map(action, bp).norm() < ZERO_LEVEL_TOL * max(1.0, float(np.linalg.norm(xi))):
            out.append(bp)
    return out


def invariance_residual(action: Action, f: ObservableFn, bp: BundlePoint, rng: np.random.Generator, elements: int = 50) -> float:
    """max |f(g·p) − f(p)| over sampled g."""
    base = float(primal(f(bp)))
    worst = 0.0
    for _ in range(elements):
        g = haar_sample(action.group, rng)
        worst = max(worst, abs(float(primal(f(action.lift(g, bp)))) - base))
    return worst


def generator_derivative_residual(action: Action, f: ObservableFn, bp: BundlePoint) -> float:
    """max_a |df(X_a^#)|, which vanishes for G-invariant f."""
    df = _coordinate_gradient(f, bp)
    worst = 0.0
    for a in range(action.group.group_dim):
        Xs = primal(cotangent_generator_coordinates(action, action.group.basis_element(a), bp))
        worst = max(worst, abs(float(df @ Xs)))
    return worst


def bundle_coordinates(m: ManifoldModel, bp: BundlePoint, Z: BundleTangent) -> np.ndarray:
    return primal(to_coordinates(m, bp, Z))
