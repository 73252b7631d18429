"""Sections, generalized Weyl groups and the symplectic slice.

Bundle tangents are handled in the splitting representation Φ = (dπ, I_g):
a vector in R^{2n} whose first half is horizontal and second half vertical.
The Sasaki metric is then block-diagonal diag(g, g) and J(a, w) = (−w, a).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from polarsym.errors import (
    ConvergenceError,
    DimensionMismatchError,
    PreconditionError,
    WeylClosureError,
)
from polarsym.geometry import ManifoldModel, Submanifold
from polarsym.hamilton import ObservableFn, cotangent_generator, moment_map
from polarsym.liegroups import (
    Action,
    AlgebraElement,
    GroupElement,
    generator_field,
    generator_matrix,
    group_exp,
    haar_sample,
    isotropy_algebra,
)
from polarsym.numcore import (
    dual_jacobian,
    mat_inv,
    metric_complement,
    metric_orthonormal_basis,
    null_space,
    numerical_rank,
    primal,
    span_residual,
)
from polarsym.sasaki import (
    BundleKind,
    BundlePoint,
    BundleTangent,
    from_coordinates,
    sharp,
    tangent_bundle_of,
    to_coordinates,
)
from polarsym.utils import CheckResult

logger = logging.getLogger(__name__)

DIM_RTOL = 1e-8
SECTION_TOL = 1e-8
COVECTOR_TOL = 1e-7
MOMENT_PRECONDITION = 1e-8
FALLBACK_ITERATIONS = 10_000


@dataclass(frozen=True)
class LinearData:
    """Exact data of a linear polar representation.

    ``section_matrix`` (n × k) embeds Σ-coordinates into 𝔭-coordinates and
    ``gram`` is the constant metric; both hold Fractions. ``generator_files``
    maps the number of copies m to a file under ``polarsym/generators``.
    """

    section_matrix: tuple[tuple[Fraction, ...], ...]
    gram: tuple[tuple[Fraction, ...], ...]
    generator_files: tuple[tuple[int, str], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def section_dim(self) -> int:
        return len(self.section_matrix[0])

    def section_array(self) -> np.ndarray:
        return np.array([[float(c) for c in row] for row in self.section_matrix])

    def gram_array(self) -> np.ndarray:
        return np.array([[float(c) for c in row] for row in self.gram])

    def generator_file(self, m: int) -> Optional[str]:
        return dict(self.generator_files).get(m)


@dataclass(frozen=True, eq=False)
class PolarStructure:
    name: str
    action: Action
    section: Submanifold
    weyl_elements: tuple[GroupElement, ...]
    canonicalize: Optional[Callable[[np.ndarray], tuple[GroupElement, np.ndarray]]]
    sample_point: Callable[[np.random.Generator], np.ndarray]
    sample_section_param: Callable[[np.random.Generator], np.ndarray]
    principal_isotropy_dim: int
    expected_weyl_order: int
    slice_step: Optional[Callable[[BundlePoint], GroupElement]] = None
    linear: Optional[LinearData] = None
    invariants: tuple[ObservableFn, ...] = ()
    singular_section_params: tuple[tuple[float, ...], ...] = ()

    @property
    def manifold(self) -> ManifoldModel:
        return self.action.manifold


@dataclass(frozen=True, eq=False)
class WeylGroup:
    elements: tuple[GroupElement, ...]
    # induced linear maps in Σ-coordinates, one per element
    action_on_section: tuple[np.ndarray, ...]

    @property
    def order(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class SliceRep:
    base_point: np.ndarray
    isotropy_basis: tuple[AlgebraElement, ...]
    normal_frame: np.ndarray
    section_trace: np.ndarray


@dataclass(frozen=True)
class SymplecticSlice:
    V: np.ndarray
    W: np.ndarray
    orbit_dim: int
    dims: dict[str, int]
    residuals: dict[str, float] = field(default_factory=dict)


def _phi_gram(m: ManifoldModel, x: Sequence[float]) -> np.ndarray:
    g = primal(m.metric(x))
    n = g.shape[0]
    G = np.zeros((2 * n, 2 * n))
    G[:n, :n] = g
    G[n:, n:] = g
    return G


def _phi(Z: BundleTangent) -> np.ndarray:
    return np.concatenate([primal(Z.horizontal), primal(Z.vertical)])


def _J(vectors: np.ndarray) -> np.ndarray:
    n = vectors.shape[0] // 2
    return np.concatenate([-vectors[n:], vectors[:n]], axis=0)


def bundle_distance(m: ManifoldModel, p: BundlePoint, q: BundlePoint) -> float:
    d_base = m.difference(primal(p.base), primal(q.base))
    d_fiber = primal(p.fiber) - primal(q.fiber)
    return float(np.linalg.norm(np.concatenate([d_base, d_fiber])))


def section_tangent_basis(ps: PolarStructure, x: Sequence[float]) -> np.ndarray:
    m = ps.manifold
    return metric_orthonormal_basis(ps.section.tangent_basis(x), primal(m.metric(x)))


def orthogonality_residual(ps: PolarStructure, x: Sequence[float]) -> float:
    """max |g(X_a*(x), e_j)| over generators and a g-orthonormal basis e of T_xΣ."""
    m = ps.manifold
    E = section_tangent_basis(ps, x)
    A = primal(generator_matrix(ps.action, x))
    if A.shape[1] == 0:
        return 0.0
    return float(np.max(np.abs(A.T @ primal(m.metric(x)) @ E)))


def cotangent_section_residual(ps: PolarStructure, bp: BundlePoint) -> float:
    """Distance of bp from T*Σ: base distance plus the normal part of ξ^♯."""
    m = ps.manifold
    x = primal(bp.base)
    base = ps.section.distance(x)
    v = primal(sharp(m, x, primal(bp.fiber)))
    normal = m.norm(x, v - ps.section.tangent_projection(x, v))
    return base + normal


def verify_section(ps: PolarStructure, samples: int, rng: np.random.Generator) -> CheckResult:
    """Orthogonality of orbits to Σ, and Σ meeting every sampled orbit."""
    orth = CheckResult("orthogonality")
    meet = CheckResult("meeting")
    for index in range(samples):
        s = ps.sample_section_param(rng)
        x = primal(ps.section.point(s))
        orth.record(orthogonality_residual(ps, x), sample=index, section_param=s)
        y = np.asarray(ps.sample_point(rng), dtype=float)
        h1, target = project_point(ps, y)
        landed = primal(ps.action.act(h1, y))
        residual = ps.section.distance(landed) + float(np.linalg.norm(ps.manifold.difference(landed, target)))
        meet.record(residual, sample=index, point=y)
    result = CheckResult("section-orthogonality")
    result.merge(orth, "orthogonality_")
    result.merge(meet, "meeting_")
    result.sample_count = samples
    return result


def _section_map(ps: PolarStructure, w: GroupElement, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    k = ps.section.dim
    S = np.stack([np.asarray(ps.sample_section_param(rng), dtype=float) for _ in range(max(3 * k, 4))], axis=1)
    images = []
    worst_off = 0.0
    for j in range(S.shape[1]):
        y = primal(ps.action.act(w, primal(ps.section.point(S[:, j]))))
        worst_off = max(worst_off, ps.section.distance(y))
        images.append(np.asarray(ps.section.locate(y), dtype=float))
    T = np.stack(images, axis=1)
    M = np.linalg.lstsq(S.T, T.T, rcond=None)[0].T
    fit = float(np.max(np.abs(M @ S - T)))
    return M, max(worst_off, fit)


def compute_weyl_group(ps: PolarStructure, rng: Optional[np.random.Generator] = None, tol: float = 1e-9) -> WeylGroup:
    """Validate the example's Weyl representatives and their induced maps on Σ."""
    rng = rng or np.random.default_rng(0)
    maps = []
    for w in ps.weyl_elements:
        M, residual = _section_map(ps, w, rng)
        if residual > tol:
            raise WeylClosureError(f"{ps.name}: Weyl element does not preserve the section (residual {residual:.3e})")
        maps.append(M)
    for i, Mi in enumerate(maps):
        for j, Mj in enumerate(maps):
            if i < j and np.max(np.abs(Mi - Mj)) < 1e-8:
                raise WeylClosureError(f"{ps.name}: Weyl elements {i} and {j} act identically on the section")
    for Mi in maps:
        for Mj in maps:
            product = Mi @ Mj
            if not any(np.max(np.abs(product - Mk)) < 1e-8 for Mk in maps):
                raise WeylClosureError(f"{ps.name}: Weyl representatives are not closed under composition")
    if len(maps) != ps.expected_weyl_order:
        raise WeylClosureError(f"{ps.name}: Weyl group order {len(maps)}, expected {ps.expected_weyl_order}")
    return WeylGroup(tuple(ps.weyl_elements), tuple(maps))


def _exp_coeffs(action: Action, basis: Sequence[AlgebraElement], c: np.ndarray) -> GroupElement:
    X = action.group.algebra(np.zeros(action.group.group_dim))
    for ci, K in zip(c, basis):
        X = X + K * float(ci)
    return group_exp(X)


def _minimize_over(
    objective: Callable[[np.ndarray], float],
    dim: int,
    iterations: int,
    starts: int = 6,
) -> tuple[np.ndarray, float, int]:
    rng = np.random.default_rng(0)
    best_c, best_val, used = np.zeros(dim), objective(np.zeros(dim)), 0
    for attempt in range(starts):
        c0 = np.zeros(dim) if attempt == 0 else rng.uniform(-np.pi, np.pi, size=dim)
        res = optimize.minimize(objective, c0, method="BFGS", options={"maxiter": iterations, "gtol": 1e-14})
        used += int(res.nit)
        if res.fun < best_val:
            best_c, best_val = res.x, float(res.fun)
        if best_val < 1e-20:
            break
    return best_c, best_val, used


def project_point(ps: PolarStructure, x: Sequence[float], iterations: int = FALLBACK_ITERATIONS) -> tuple[GroupElement, np.ndarray]:
    """h₁ with h₁·x ∈ Σ, by the example's closed form or a search over the group."""
    m = ps.manifold
    x = np.asarray(x, dtype=float)
    m.require(x)
    if ps.canonicalize is not None:
        h1, target = ps.canonicalize(x)
        if ps.section.distance(primal(ps.action.act(h1, x))) < SECTION_TOL:
            return h1, np.asarray(target, dtype=float)
        logger.debug("closed-form projection missed the section at %s; falling back", x)
    basis = [ps.action.group.basis_element(a) for a in range(ps.action.group.group_dim)]

    def objective(c: np.ndarray) -> float:
        return ps.section.distance(primal(ps.action.act(_exp_coeffs(ps.action, basis, c), x))) ** 2

    c, best, used = _minimize_over(objective, len(basis), iterations)
    if np.sqrt(best) > SECTION_TOL:
        raise ConvergenceError("projection onto the section did not converge", float(np.sqrt(best)), used)
    h1 = _exp_coeffs(ps.action, basis, c)
    return h1, primal(ps.action.act(h1, x))


def project_covector(ps: PolarStructure, bp: BundlePoint, iterations: int = FALLBACK_ITERATIONS) -> tuple[GroupElement, BundlePoint]:
    """h = h₂h₁ moving a point of u⁻¹(0) into T*Σ."""
    u = moment_map(ps.action, bp).norm()
    if u > MOMENT_PRECONDITION * max(1.0, float(np.linalg.norm(primal(bp.fiber)))):
        raise PreconditionError(f"point is not in the zero level of the moment map (|u| = {u:.3e})")
    h1, _ = project_point(ps, primal(bp.base), iterations)
    bp1 = ps.action.lift(h1, bp)
    bp1 = BundlePoint(primal(bp1.base), primal(bp1.fiber), BundleKind.COTANGENT)
    if cotangent_section_residual(ps, bp1) < COVECTOR_TOL:
        return h1, bp1
    if ps.slice_step is not None:
        h2 = ps.slice_step(bp1)
        candidate = ps.action.lift(h2, bp1)
        candidate = BundlePoint(primal(candidate.base), primal(candidate.fiber), BundleKind.COTANGENT)
        if cotangent_section_residual(ps, candidate) < COVECTOR_TOL:
            return h2 @ h1, candidate
    basis = isotropy_algebra(ps.action, primal(bp1.base))
    if not basis:
        raise ConvergenceError("no isotropy left to rotate the covector into the section", cotangent_section_residual(ps, bp1), 0)

    def objective(c: np.ndarray) -> float:
        return cotangent_section_residual(ps, ps.action.lift(_exp_coeffs(ps.action, basis, c), bp1)) ** 2

    c, best, used = _minimize_over(objective, len(basis), iterations)
    if np.sqrt(best) > COVECTOR_TOL:
        raise ConvergenceError("slice step did not reach the section", float(np.sqrt(best)), used)
    h2 = _exp_coeffs(ps.action, basis, c)
    out = ps.action.lift(h2, bp1)
    return h2 @ h1, BundlePoint(primal(out.base), primal(out.fiber), BundleKind.COTANGENT)


def orbit_directions(action: Action, bp: BundlePoint) -> np.ndarray:
    """Columns Φ(X_a^#) for the algebra basis (2n × dim G)."""
    cols = [_phi(cotangent_generator(action, action.group.basis_element(a), bp)) for a in range(action.group.group_dim)]
    n = action.manifold.dim
    return np.stack(cols, axis=1) if cols else np.zeros((2 * n, 0))


def cotangent_section_tangents(ps: PolarStructure, bp: BundlePoint) -> np.ndarray:
    """Φ-images of a basis of T_{(x,ξ)}T*Σ (2n × 2k)."""
    m = ps.manifold
    tsigma = tangent_bundle_of(ps.section, BundleKind.COTANGENT)
    q = tsigma.locate(primal(bp.coordinates()))
    F = primal(tsigma.frame(q))
    cols = [_phi(from_coordinates(m, bp, F[:, j])) for j in range(F.shape[1])]
    return np.stack(cols, axis=1)


def normal_space(ps: PolarStructure, x: Sequence[float]) -> np.ndarray:
    """g-orthonormal basis of T_x(G·x)^⊥."""
    m = ps.manifold
    A = primal(generator_matrix(ps.action, x))
    return metric_complement(A, primal(m.metric(x)), rtol=DIM_RTOL)


def isotropy_directions(ps: PolarStructure, x: Sequence[float], y: np.ndarray, basis: Sequence[AlgebraElement]) -> np.ndarray:
    """Tangents K·y of the isotropy action on T_xM, i.e. ∇_y K* = DK*(x) y."""
    n = ps.manifold.dim
    cols = []
    for K in basis:
        _, DK = dual_jacobian(lambda z: generator_field(ps.action, K, z), x)
        cols.append(primal(DK) @ y)
    return np.stack(cols, axis=1) if cols else np.zeros((n, 0))


def symplectic_slice(ps: PolarStructure, bp: BundlePoint) -> SymplecticSlice:
    """V = (T(G·p) ⊕ J T(G·p))^⊥ and W = (G_x ξ^♯)^⊥ inside the normal slice."""
    m = ps.manifold
    x = primal(bp.base)
    n = m.dim
    if cotangent_section_residual(ps, bp) > SECTION_TOL:
        raise PreconditionError("symplectic_slice expects a point of T*Σ")
    G = _phi_gram(m, x)
    g = primal(m.metric(x))
    O = orbit_directions(ps.action, bp)
    orbit_dim = numerical_rank(O, rtol=DIM_RTOL) if O.shape[1] else 0
    V = metric_complement(np.concatenate([O, _J(O)], axis=1), G, rtol=DIM_RTOL)

    N = normal_space(ps, x)
    xi_sharp = primal(sharp(m, x, primal(bp.fiber)))
    D = isotropy_directions(ps, x, xi_sharp, isotropy_algebra(ps.action, x))
    if D.shape[1] and N.shape[1]:
        # W = N ∩ (G_x ξ^♯)^⊥
        coords = null_space(D.T @ g @ N, rtol=DIM_RTOL)
        W = metric_orthonormal_basis(N @ coords, g) if coords.shape[1] else np.zeros((n, 0))
    else:
        W = N
    WW = np.zeros((2 * n, 2 * W.shape[1]))
    WW[:n, : W.shape[1]] = W
    WW[n:, W.shape[1] :] = W

    dims = {
        "orbit": orbit_dim,
        "V": V.shape[1],
        "W": W.shape[1],
        "bundle": 2 * n,
        "expected_V": 2 * n - 2 * orbit_dim,
    }
    if V.shape[1] != 2 * W.shape[1]:
        raise DimensionMismatchError("dim V versus 2 dim W", 2 * W.shape[1], V.shape[1])
    if V.shape[1] != 2 * n - 2 * orbit_dim:
        raise DimensionMismatchError("dim V versus 2(dim M - dim G(x,ξ))", 2 * n - 2 * orbit_dim, V.shape[1])

    WW_basis = metric_orthonormal_basis(WW, G) if WW.shape[1] else WW
    T = cotangent_section_tangents(ps, bp)
    residuals = {
        "V_in_WW": span_residual(V, WW_basis, G),
        "WW_in_V": span_residual(WW, V, G),
        "TTSigma_in_V": span_residual(T, V, G),
        "J_orbit_orthogonal": float(np.max(np.abs(_J(O).T @ G @ O))) if O.shape[1] else 0.0,
        "orbit_TTSigma_orthogonal": float(np.max(np.abs(O.T @ G @ T))) if O.shape[1] else 0.0,
    }
    return SymplecticSlice(V=V, W=W, orbit_dim=orbit_dim, dims=dims, residuals=residuals)


def is_principal(ps: PolarStructure, x: Sequence[float]) -> bool:
    return len(isotropy_algebra(ps.action, x)) == ps.principal_isotropy_dim


def principal_splitting(ps: PolarStructure, bp: BundlePoint) -> CheckResult:
    """T(T*M) = T(G·p) ⊕ J T(G·p) ⊕ T(T*Σ̊), orthogonal for the Sasaki metric."""
    m = ps.manifold
    x = primal(bp.base)
    if not is_principal(ps, x):
        raise PreconditionError(f"{ps.name}: base point is not in the principal stratum")
    G = _phi_gram(m, x)
    O = orbit_directions(ps.action, bp)
    Ob = metric_orthonormal_basis(O, G, rtol=DIM_RTOL) if O.shape[1] else O
    JOb = _J(Ob)
    T = metric_orthonormal_basis(cotangent_section_tangents(ps, bp), G, rtol=DIM_RTOL)
    blocks = [Ob, JOb, T]
    off = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            if blocks[i].shape[1] and blocks[j].shape[1]:
                off = max(off, float(np.max(np.abs(blocks[i].T @ G @ blocks[j]))))
    dims = [b.shape[1] for b in blocks]
    total = sum(dims)
    result = CheckResult("principal-splitting")
    dim_gap = 0.0 if total == 2 * m.dim else float("inf")
    result.record(max(off, dim_gap), point=primal(bp.coordinates()))
    result.extra.update({"orbit_dim": dims[0], "J_orbit_dim": dims[1], "section_dim": dims[2], "bundle_dim": 2 * m.dim})
    return result


def bundle_isotropy_algebra(action: Action, bp: BundlePoint, rtol: float = DIM_RTOL) -> list[AlgebraElement]:
    """Basis of {X : X^#(x, ξ) = 0}, the Lie algebra of G_{(x,ξ)}."""
    O = orbit_directions(action, bp)
    if O.shape[1] == 0:
        return []
    K = null_space(O, rtol=rtol)
    return [AlgebraElement(K[:, j], action.group) for j in range(K.shape[1])]


def _lifted_differential(ps: PolarStructure, h: GroupElement, bp: BundlePoint, Z: np.ndarray) -> np.ndarray:
    """Φ(d h̃ (Φ⁻¹ Z)) at bp, assuming h fixes bp."""
    m = ps.manifold
    z = primal(bp.coordinates())
    n = m.dim

    def lifted(w: np.ndarray) -> np.ndarray:
        return ps.action.lift(h, BundlePoint(w[:n], w[n:], BundleKind.COTANGENT)).coordinates()

    _, jac = dual_jacobian(lifted, z)
    dz = primal(to_coordinates(m, bp, BundleTangent(Z[:n], Z[n:])))
    return _phi(from_coordinates(m, bp, primal(jac) @ dz))


def check_slice_diagram(ps: PolarStructure, bp: BundlePoint, rng: np.random.Generator, samples: int = 5) -> CheckResult:
    """Φ ∘ dh̃ = (h ⊕ h) ∘ Φ on V for isotropy elements of (x, ξ)."""
    m = ps.manifold
    x = primal(bp.base)
    sl = symplectic_slice(ps, bp)
    result = CheckResult("slice-diagram")
    elements: list[tuple[str, GroupElement]] = []
    K = bundle_isotropy_algebra(ps.action, bp)
    for _ in range(samples if K else 0):
        elements.append(("identity-component", _exp_coeffs(ps.action, K, rng.normal(scale=np.pi, size=len(K)))))
    finite = 0
    for w in ps.weyl_elements:
        moved = ps.action.lift(w, bp)
        if bundle_distance(m, moved, bp) < 1e-9:
            elements.append(("weyl", w))
            finite += 1
    for label, h in elements:
        D = primal(ps.action.differential(h, x))
        worst = 0.0
        for j in range(sl.V.shape[1]):
            Z = sl.V[:, j]
            lhs = _lifted_differential(ps, h, bp, Z)
            n = m.dim
            rhs = np.concatenate([D @ Z[:n], D @ Z[n:]])
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
        result.record(worst, component=label, h=h.matrix)
    result.extra.update({
        "identity_component_samples": samples if K else 0,
        "finite_components_tested": finite,
        "bundle_isotropy_dim": len(K),
    })
    return result


def weyl_orbit_intersection(
    ps: PolarStructure,
    bp: BundlePoint,
    rng: np.random.Generator,
    translates: int = 500,
    tol: float = 1e-6,
) -> CheckResult:
    """G·p ∩ T*Σ = Π·p for p ∈ T*Σ.

    Each Π-image is certified by its Weyl representative. Random G-translates
    are pushed back into T*Σ by project_covector and must land on a Π-image.
    """
    m = ps.manifold
    images: list[BundlePoint] = []
    membership = 0.0
    for w in ps.weyl_elements:
        q = ps.action.lift(w, bp)
        q = BundlePoint(primal(q.base), primal(q.fiber), BundleKind.COTANGENT)
        membership = max(membership, cotangent_section_residual(ps, q))
        if all(bundle_distance(m, q, p) > 1e-9 for p in images):
            images.append(q)
    result = CheckResult("weyl-intersection")
    result.record(membership, part="pi-images-in-section")
    landed = 0
    for index in range(translates):
        g = haar_sample(ps.action.group, rng)
        q = ps.action.lift(g, bp)
        q = BundlePoint(primal(q.base), primal(q.fiber), BundleKind.COTANGENT)
        if cotangent_section_residual(ps, q) < tol:
            landed += 1
        _, back = project_covector(ps, q)
        distance = min(bundle_distance(m, back, p) for p in images)
        result.record(distance, sample=index, translate=primal(q.coordinates()))
    result.extra.update({"intersection_points": len(images), "raw_translates_in_section": landed})
    return result


def slice_representation(ps: PolarStructure, x: Sequence[float]) -> SliceRep:
    m = ps.manifold
    x = np.asarray(x, dtype=float)
    g = primal(m.metric(x))
    N = normal_space(ps, x)
    E = section_tangent_basis(ps, x)
    return SliceRep(
        base_point=x,
        isotropy_basis=tuple(isotropy_algebra(ps.action, x)),
        normal_frame=N,
        section_trace=metric_orthonormal_basis(N @ (N.T @ g @ E), g) if E.shape[1] else E,
    )


def check_slice_polarity(ps: PolarStructure, samples: int, rng: np.random.Generator) -> CheckResult:
    """Slice-orbit directions K·y at y ∈ T_xΣ are orthogonal to T_xΣ."""
    m = ps.manifold
    result = CheckResult("slice-polarity")
    params = [np.asarray(p, dtype=float) for p in ps.singular_section_params]
    params += [np.asarray(ps.sample_section_param(rng), dtype=float) for _ in range(samples)]
    for index, s in enumerate(params):
        x = primal(ps.section.point(s))
        rep = slice_representation(ps, x)
        g = primal(m.metric(x))
        containment = span_residual(rep.section_trace, rep.normal_frame, g)
        worst = containment
        if rep.isotropy_basis and rep.section_trace.shape[1]:
            for _ in range(3):
                y = rep.section_trace @ rng.normal(size=rep.section_trace.shape[1])
                D = isotropy_directions(ps, x, y, rep.isotropy_basis)
                worst = max(worst, float(np.max(np.abs(D.T @ g @ rep.section_trace))))
        result.record(worst, sample=index, section_param=s, isotropy_dim=len(rep.isotropy_basis))
    return result


def section_model(ps: PolarStructure) -> ManifoldModel:
    """Σ with its induced metric E(s)ᵀ g(param(s)) E(s)."""
    sec = ps.section
    m = ps.manifold

    def metric(s: np.ndarray) -> np.ndarray:
        E = sec.frame(s)
        return E.T @ m.metric(sec.point(s)) @ E

    def inside(s: np.ndarray) -> bool:
        return m.contains(primal(sec.point(s)))

    return ManifoldModel(
        name=f"{sec.name}-induced",
        dim=sec.dim,
        metric_fn=metric,
        chart_domain=inside,
        constant_metric=m.constant_metric and ps.linear is not None,
    )


def embed_section_covector(ps: PolarStructure, s: Sequence[Any], eta: Sequence[Any]) -> BundlePoint:
    """(s, η) ∈ T*Σ ↦ (x, ξ) ∈ T*M with ξ^♯ = (η^♯ in Σ) pushed forward."""
    sec = ps.section
    m = ps.manifold
    s = np.asarray(s)
    x = sec.point(s)
    E = sec.frame(s)
    g = m.metric(x)
    g_sigma = E.T @ g @ E
    xi = g @ E @ (mat_inv(g_sigma) @ np.asarray(eta))
    return BundlePoint(x, xi, BundleKind.COTANGENT)


def restrict_observable(ps: PolarStructure, F: ObservableFn) -> ObservableFn:
    """F ∘ (T*Σ ↪ T*M) as an observable in (s, η) coordinates."""

    def restricted(s: np.ndarray, eta: np.ndarray) -> Any:
        return F(embed_section_covector(ps, s, eta))

    return ObservableFn(f"{F.name}|T*Σ", restricted)


def sample_section_covector(ps: PolarStructure, rng: np.random.Generator) -> BundlePoint:
    s = np.asarray(ps.sample_section_param(rng), dtype=float)
    eta = rng.normal(size=ps.section.dim)
    bp = embed_section_covector(ps, s, eta)
    return BundlePoint(primal(bp.base), primal(bp.fiber), BundleKind.COTANGENT)


def section_covector_coordinates(ps: PolarStructure, bp: BundlePoint) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of embed_section_covector for points of T*Σ."""
    m = ps.manifold
    x = primal(bp.base)
    s = np.asarray(ps.section.locate(x), dtype=float)
    E = primal(ps.section.frame(s))
    return s, E.T @ primal(bp.fiber)
