"""Compact matrix groups, their Lie algebras and isometric actions."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy import linalg as sla

from polarsym.geometry import ManifoldModel
from polarsym.numcore import DualScalar, dual_jacobian, is_dual, mat_solve, null_space, pack, primal
from polarsym.sasaki import BundleKind, BundlePoint

logger = logging.getLogger(__name__)

ISOTROPY_RTOL = 1e-8
HAAR_ROUNDS = 3
HAAR_SCALE = np.pi


def _orthogonal_residual(g: np.ndarray) -> float:
    n = g.shape[0]
    return float(np.max(np.abs(g.T @ g - np.eye(n))) + abs(np.linalg.det(g) - 1.0))


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    name: str
    ambient_dim: int
    algebra_basis: tuple[np.ndarray, ...]
    # extra defining relations beyond gᵀg = I, det g = 1
    extra_relations: Optional[Callable[[np.ndarray], float]] = None

    @property
    def group_dim(self) -> int:
        return len(self.algebra_basis)

    def relation_residual(self, matrix: np.ndarray) -> float:
        g = primal(np.asarray(matrix))
        res = _orthogonal_residual(g)
        if self.extra_relations is not None:
            res += self.extra_relations(g)
        return res

    def identity(self) -> "GroupElement":
        return GroupElement(np.eye(self.ambient_dim), self)

    def element(self, matrix: Any) -> "GroupElement":
        return GroupElement(np.asarray(matrix), self)

    def algebra(self, coefficients: Sequence[Any]) -> "AlgebraElement":
        return AlgebraElement(pack(list(coefficients)), self)

    def basis_element(self, a: int) -> "AlgebraElement":
        c = np.zeros(self.group_dim)
        c[a] = 1.0
        return AlgebraElement(c, self)

    def algebra_coordinates(self, matrix: np.ndarray) -> np.ndarray:
        """Coefficients of a matrix in the algebra basis (least squares)."""
        B = np.stack([b.ravel() for b in self.algebra_basis], axis=1)
        coeffs, *_ = np.linalg.lstsq(B, primal(np.asarray(matrix)).ravel(), rcond=None)
        return coeffs

    def basis_independent(self) -> bool:
        if not self.algebra_basis:
            return True
        B = np.stack([b.ravel() for b in self.algebra_basis], axis=1)
        return int(np.linalg.matrix_rank(B)) == self.group_dim


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    coefficients: np.ndarray
    group: MatrixGroup

    @property
    def matrix(self) -> np.ndarray:
        n = self.group.ambient_dim
        out = np.zeros((n, n))
        for c, b in zip(self.coefficients, self.group.algebra_basis):
            out = out + c * b
        return out

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.coefficients + other.coefficients, self.group)

    def __mul__(self, c: Any) -> "AlgebraElement":
        return AlgebraElement(self.coefficients * c, self.group)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    group: MatrixGroup

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix, self.group)

    def inverse(self) -> "GroupElement":
        # every group here is a closed subgroup of SO(n)
        return GroupElement(self.matrix.T.copy(), self.group)

    def relation_residual(self) -> float:
        return self.group.relation_residual(self.matrix)


def _top_tag(matrix: np.ndarray) -> int:
    return max((v.tag for v in matrix.ravel() if isinstance(v, DualScalar)), default=-1)


def matrix_exp(M: np.ndarray) -> np.ndarray:
    """Matrix exponential that propagates dual-number perturbations.

    The derivative along each partial is the Fréchet derivative of expm; for
    nested duals the block identity exp([[A, E], [0, A]]) = [[e^A, L(A, E)], [0, e^A]]
    is applied recursively.
    """
    M = np.asarray(M)
    if not is_dual(M):
        return sla.expm(M.astype(float))
    tag = _top_tag(M)
    n = M.shape[0]
    values = np.empty((n, n), dtype=object)
    partials: list[list[Any]] = [[None] * n for _ in range(n)]
    size = None
    for i in range(n):
        for j in range(n):
            v = M[i, j]
            if isinstance(v, DualScalar) and v.tag == tag:
                values[i, j] = v.value
                partials[i][j] = v.partials
                size = len(v.partials)
            else:
                values[i, j] = v
    assert size is not None
    directions = np.empty((size, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            p = partials[i][j]
            for k in range(size):
                directions[k, i, j] = 0.0 if p is None else p[k]
    values = pack(values.tolist())
    if not is_dual(values) and not any(is_dual(pack(directions[k].tolist())) for k in range(size)):
        A = values.astype(float)
        expA = sla.expm(A)
        derivs = [sla.expm_frechet(A, pack(directions[k].tolist()).astype(float), compute_expm=False) for k in range(size)]
    else:
        expA = None
        derivs = []
        for k in range(size):
            block = np.zeros((2 * n, 2 * n), dtype=object)
            block[:n, :n] = values
            block[n:, n:] = values
            block[:n, n:] = directions[k]
            block[n:, :n] = 0.0
            big = matrix_exp(block)
            expA = big[:n, :n]
            derivs.append(big[:n, n:])
        if expA is None:
            expA = matrix_exp(values)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = DualScalar(expA[i, j], pack([d[i, j] for d in derivs]), tag)
    return out


def group_exp(X: AlgebraElement, t: Any = 1.0) -> GroupElement:
    return GroupElement(matrix_exp(X.matrix * t), X.group)


def haar_sample(group: MatrixGroup, rng: np.random.Generator) -> GroupElement:
    """Product of exponentials of Gaussian algebra elements."""
    g = np.eye(group.ambient_dim)
    for _ in range(HAAR_ROUNDS):
        X = group.algebra(rng.normal(scale=HAAR_SCALE, size=group.group_dim))
        g = g @ sla.expm(X.matrix)
    return GroupElement(g, group)


def adjoint_matrix(g: GroupElement) -> np.ndarray:
    """Matrix of Ad_g in the algebra basis; column a holds Ad_g(B_a)."""
    G = primal(g.matrix)
    Ginv = G.T
    cols = [g.group.algebra_coordinates(G @ b @ Ginv) for b in g.group.algebra_basis]
    return np.stack(cols, axis=1) if cols else np.zeros((0, 0))


@dataclass(frozen=True, eq=False)
class Action:
    group: MatrixGroup
    manifold: ManifoldModel
    act_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    # for linear representations, the coordinate matrix of g
    representation: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = field(default="")

    @property
    def is_linear(self) -> bool:
        return self.representation is not None

    def act(self, g: GroupElement, x: Sequence[Any]) -> np.ndarray:
        return self.act_fn(g.matrix, np.asarray(x))

    def differential(self, g: GroupElement, x: Sequence[Any]) -> np.ndarray:
        """Dφ_g at x as an n × n matrix."""
        if self.representation is not None:
            return np.asarray(self.representation(g.matrix))
        _, jac = dual_jacobian(lambda y: self.act_fn(g.matrix, y), x)
        return np.asarray(jac)

    def lift(self, g: GroupElement, bp: BundlePoint) -> BundlePoint:
        """Lifted action: v ↦ Dφ_g v on TM, ξ ↦ (Dφ_g)^{-T} ξ on T*M."""
        x_new = self.act(g, bp.base)
        D = self.differential(g, bp.base)
        if bp.kind is BundleKind.TANGENT:
            return BundlePoint(x_new, D @ np.asarray(bp.fiber), bp.kind)
        return BundlePoint(x_new, mat_solve(D.T, np.asarray(bp.fiber)), bp.kind)

    def isometry_residual(self, g: GroupElement, x: Sequence[float]) -> float:
        x = np.asarray(x, dtype=float)
        D = primal(self.differential(g, x))
        lhs = D.T @ primal(self.manifold.metric(primal(self.act(g, x)))) @ D
        return float(np.max(np.abs(lhs - primal(self.manifold.metric(x)))))

    def composition_residual(self, g: GroupElement, h: GroupElement, x: Sequence[float]) -> float:
        left = primal(self.act(g, self.act(h, x)))
        right = primal(self.act(g @ h, x))
        return float(np.max(np.abs(self.manifold.difference(left, right))))


def generator_field(action: Action, X: AlgebraElement, x: Sequence[Any]) -> np.ndarray:
    """X*(x) = d/dt|₀ act(exp(tX), x), differentiated through group_exp."""
    action.manifold.require(x)
    x = np.asarray(x)
    _, jac = dual_jacobian(lambda t: action.act(group_exp(X, t[0]), x), [0.0])
    return np.asarray(jac).reshape(action.manifold.dim)


def generator_matrix(action: Action, x: Sequence[Any]) -> np.ndarray:
    """Columns X_a*(x) for the algebra basis."""
    n = action.manifold.dim
    cols = [generator_field(action, action.group.basis_element(a), x) for a in range(action.group.group_dim)]
    if not cols:
        return np.zeros((n, 0))
    return pack([[c[i] for c in cols] for i in range(n)])


def isotropy_algebra(action: Action, x: Sequence[float], rtol: float = ISOTROPY_RTOL) -> list[AlgebraElement]:
    A = primal(generator_matrix(action, x))
    if A.shape[1] == 0:
        return []
    K = null_space(A, rtol=rtol)
    return [AlgebraElement(K[:, j], action.group) for j in range(K.shape[1])]


def rotation_generator(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n))
    E[j, i] = 1.0
    E[i, j] = -1.0
    return E


def so2() -> MatrixGroup:
    return MatrixGroup("SO(2)", 2, (rotation_generator(2, 0, 1),))


def so3() -> MatrixGroup:
    """so(3) with L_x, L_y, L_z, so that [L_x, L_y] = L_z."""
    return MatrixGroup(
        "SO(3)",
        3,
        (rotation_generator(3, 1, 2), rotation_generator(3, 2, 0), rotation_generator(3, 0, 1)),
    )


def torus(n: int) -> MatrixGroup:
    """T^n as block-diagonal rotations of R^{2n}."""
    basis = []
    for k in range(n):
        basis.append(rotation_generator(2 * n, 2 * k, 2 * k + 1))
    mask = np.zeros((2 * n, 2 * n), dtype=bool)
    for k in range(n):
        mask[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = True

    def off_block(g: np.ndarray) -> float:
        return float(np.max(np.abs(g[~mask]))) if (~mask).any() else 0.0

    return MatrixGroup(f"T^{n}", 2 * n, tuple(basis), extra_relations=off_block)


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def hat(w: Sequence[float]) -> np.ndarray:
    """so(3) matrix with hat(w) v = w × v."""
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def vee(W: np.ndarray) -> np.ndarray:
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def linear_action(group: MatrixGroup, manifold: ManifoldModel, representation: Callable[[np.ndarray], np.ndarray], name: str = "") -> Action:
    def act(g: np.ndarray, x: np.ndarray) -> np.ndarray:
        return representation(g) @ x

    return Action(group=group, manifold=manifold, act_fn=act, representation=representation, name=name)
