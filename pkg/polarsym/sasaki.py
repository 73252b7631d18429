"""Tangent and cotangent bundles with the Sasaki metric.

A tangent vector to the bundle is carried in the splitting representation
``BundleTangent(horizontal, vertical)``: ``horizontal`` is its image under dπ
and ``vertical`` is its fiber component transported to TM by I_g. Coordinate
representations are only used at the edges (Jacobians, linear solves).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Callable, Optional, Sequence

import numpy as np

from polarsym.errors import ChartExitError
from polarsym.geometry import (
    ManifoldModel,
    Submanifold,
    christoffel,
    christoffel_fd,
    geodesic_flow,
    riemann,
    second_fundamental_form,
)
from polarsym.numcore import dual_jacobian, pack, primal
from polarsym.utils import CheckResult

if TYPE_CHECKING:
    from polarsym.polar import PolarStructure

logger = logging.getLogger(__name__)


class BundleKind(str, Enum):
    TANGENT = "tangent"
    COTANGENT = "cotangent"


@dataclass(frozen=True)
class BundlePoint:
    base: np.ndarray
    fiber: np.ndarray
    kind: BundleKind = BundleKind.COTANGENT

    @property
    def dim(self) -> int:
        return len(self.base)

    def coordinates(self) -> np.ndarray:
        return pack(list(self.base) + list(self.fiber))

    @classmethod
    def from_coordinates(cls, z: Sequence[Any], kind: BundleKind = BundleKind.COTANGENT) -> "BundlePoint":
        z = np.asarray(z)
        n = len(z) // 2
        return cls(base=z[:n], fiber=z[n:], kind=kind)


@dataclass(frozen=True)
class BundleTangent:
    horizontal: np.ndarray
    vertical: np.ndarray

    def __add__(self, other: "BundleTangent") -> "BundleTangent":
        return BundleTangent(self.horizontal + other.horizontal, self.vertical + other.vertical)

    def __sub__(self, other: "BundleTangent") -> "BundleTangent":
        return BundleTangent(self.horizontal - other.horizontal, self.vertical - other.vertical)

    def __neg__(self) -> "BundleTangent":
        return BundleTangent(-self.horizontal, -self.vertical)

    def __mul__(self, c: Any) -> "BundleTangent":
        return BundleTangent(self.horizontal * c, self.vertical * c)

    __rmul__ = __mul__

    def stacked(self) -> np.ndarray:
        return pack(list(self.horizontal) + list(self.vertical))

    @classmethod
    def zero(cls, n: int) -> "BundleTangent":
        return cls(np.zeros(n), np.zeros(n))


def sharp(m: ManifoldModel, x: Sequence[Any], xi: Sequence[Any]) -> np.ndarray:
    return m.inverse_metric(x) @ np.asarray(xi)


def flat(m: ManifoldModel, x: Sequence[Any], v: Sequence[Any]) -> np.ndarray:
    return m.metric(x) @ np.asarray(v)


def sharp_flat(m: ManifoldModel, x: Sequence[Any], w: Sequence[Any], raise_index: bool = True) -> np.ndarray:
    """Index raising (covector → vector) or lowering (vector → covector)."""
    return sharp(m, x, w) if raise_index else flat(m, x, w)


def to_tangent(m: ManifoldModel, bp: BundlePoint) -> BundlePoint:
    if bp.kind is BundleKind.TANGENT:
        return bp
    return BundlePoint(bp.base, sharp(m, bp.base, bp.fiber), BundleKind.TANGENT)


def to_cotangent(m: ManifoldModel, bp: BundlePoint) -> BundlePoint:
    if bp.kind is BundleKind.COTANGENT:
        return bp
    return BundlePoint(bp.base, flat(m, bp.base, bp.fiber), BundleKind.COTANGENT)


def _fiber_shift(m: ManifoldModel, bp: BundlePoint, a: Any, gamma: Optional[np.ndarray] = None) -> np.ndarray:
    """Fiber-coordinate velocity of the horizontal lift of a.

    Cotangent: a^i Γ^k_{il} ξ_k. Tangent: -a^i Γ^k_{il} v^l.
    """
    if gamma is None:
        gamma = christoffel(m, bp.base)
    n = m.dim
    if bp.kind is BundleKind.COTANGENT:
        return pack([
            sum(a[i] * gamma[k, i, l] * bp.fiber[k] for i in range(n) for k in range(n)) for l in range(n)
        ])
    return pack([
        -sum(a[i] * gamma[k, i, l] * bp.fiber[l] for i in range(n) for l in range(n)) for k in range(n)
    ])


def to_coordinates(m: ManifoldModel, bp: BundlePoint, Z: BundleTangent) -> np.ndarray:
    """Bundle-coordinate components (dx, dfiber) of Z."""
    shift = _fiber_shift(m, bp, Z.horizontal)
    if bp.kind is BundleKind.COTANGENT:
        dfiber = flat(m, bp.base, Z.vertical) + shift
    else:
        dfiber = np.asarray(Z.vertical) + shift
    return pack(list(Z.horizontal) + list(dfiber))


def from_coordinates(
    m: ManifoldModel,
    bp: BundlePoint,
    dz: Sequence[Any],
    gamma: Optional[np.ndarray] = None,
    ginv: Optional[np.ndarray] = None,
) -> BundleTangent:
    dz = np.asarray(dz)
    n = m.dim
    a = dz[:n]
    rest = dz[n:] - _fiber_shift(m, bp, a, gamma)
    if bp.kind is BundleKind.COTANGENT:
        if ginv is None:
            ginv = m.inverse_metric(bp.base)
        return BundleTangent(a, ginv @ rest)
    return BundleTangent(a, rest)


def horizontal_lift(m: ManifoldModel, bp: BundlePoint, X: Sequence[Any]) -> np.ndarray:
    X = np.asarray(X)
    return to_coordinates(m, bp, BundleTangent(X, np.zeros(m.dim)))


def vertical_lift(m: ManifoldModel, bp: BundlePoint, w: Sequence[Any]) -> np.ndarray:
    return to_coordinates(m, bp, BundleTangent(np.zeros(m.dim), np.asarray(w)))


def sasaki_inner(m: ManifoldModel, bp: BundlePoint, Z1: BundleTangent, Z2: BundleTangent) -> Any:
    g = m.metric(bp.base)
    return Z1.horizontal @ g @ Z2.horizontal + Z1.vertical @ g @ Z2.vertical


def apply_J(Z: BundleTangent) -> BundleTangent:
    return BundleTangent(-Z.vertical, Z.horizontal)


def symplectic_form(m: ManifoldModel, bp: BundlePoint, Z1: BundleTangent, Z2: BundleTangent) -> Any:
    """Ω(Z1, Z2) = g̃(J Z1, Z2)."""
    return sasaki_inner(m, bp, apply_J(Z1), Z2)


def canonical_form(dz1: Sequence[Any], dz2: Sequence[Any]) -> Any:
    """ω = Σ dx^i ∧ dξ_i on coordinate vectors."""
    dz1, dz2 = np.asarray(dz1), np.asarray(dz2)
    n = len(dz1) // 2
    return dz1[:n] @ dz2[n:] - dz2[:n] @ dz1[n:]


def _coordinate_frame(m: ManifoldModel, bp: BundlePoint) -> list[BundleTangent]:
    eye = np.eye(2 * m.dim)
    gamma = christoffel(m, bp.base)
    ginv = m.inverse_metric(bp.base)
    return [from_coordinates(m, bp, eye[a], gamma, ginv) for a in range(2 * m.dim)]


def sasaki_gram(m: ManifoldModel, bp: BundlePoint) -> np.ndarray:
    """Coordinate matrix of the Sasaki metric at bp."""
    frame = _coordinate_frame(m, bp)
    return pack([[sasaki_inner(m, bp, A, B) for B in frame] for A in frame])


def symplectic_gram(m: ManifoldModel, bp: BundlePoint) -> np.ndarray:
    """Ω(e_a, e_b) over the coordinate basis."""
    frame = _coordinate_frame(m, bp)
    return pack([[symplectic_form(m, bp, A, B) for B in frame] for A in frame])


def sasaki_bundle_model(m: ManifoldModel, kind: BundleKind = BundleKind.COTANGENT) -> ManifoldModel:
    """(TM or T*M, g̃) as a 2n-dimensional chart model."""
    n = m.dim

    def metric(z: np.ndarray) -> np.ndarray:
        return sasaki_gram(m, BundlePoint(z[:n], z[n:], kind))

    periods = None
    if m.periods:
        periods = tuple(m.periods) + (None,) * n
    return ManifoldModel(
        name=f"{kind.value}({m.name})",
        dim=2 * n,
        metric_fn=metric,
        chart_domain=lambda z: m.chart_domain(z[:n]),
        constant_metric=m.constant_metric,
        periods=periods,
    )


@dataclass(frozen=True)
class LiftedField:
    """Horizontal or vertical lift of a base field known to first order at a point.

    The base field is Y(x') = value + jacobian @ (x' - anchor), jacobian[k, i] = ∂_i Y^k.
    """

    kind: str
    anchor: np.ndarray
    value: np.ndarray
    jacobian: np.ndarray

    def base_field(self, x: Any) -> np.ndarray:
        return self.value + self.jacobian @ (np.asarray(x) - self.anchor)

    def at(self, x: Any) -> BundleTangent:
        y = self.base_field(x)
        zero = np.zeros(len(self.value))
        return BundleTangent(y, zero) if self.kind == "horizontal" else BundleTangent(zero, y)


IDENTITY_SLOTS: tuple[int, int, int] = (0, 1, 2)


def slot_curvature(curv: Any, slots: Sequence[int], a: Any, b: Any, c: Any) -> np.ndarray:
    """The trilinear R_x(a, b, c) under a slot assignment: R(p0, p1) p2 with p = permuted args."""
    args = (a, b, c)
    p = [args[s] for s in slots]
    return curv.apply(p[0], p[1], p[2])


def base_connection(m: ManifoldModel, x: Any, X: np.ndarray, Y: LiftedField) -> np.ndarray:
    """∇_X Y for a first-order field Y."""
    gamma = christoffel(m, x)
    n = m.dim
    return pack([
        sum(Y.jacobian[k, i] * X[i] for i in range(n))
        + sum(gamma[k, i, j] * X[i] * Y.value[j] for i in range(n) for j in range(n))
        for k in range(n)
    ])


def sasaki_connection(
    m: ManifoldModel,
    bp: BundlePoint,
    A: LiftedField,
    B: LiftedField,
    slots: Sequence[int] = IDENTITY_SLOTS,
) -> BundleTangent:
    """∇̃_A B from the horizontal/vertical lift formulas, with v the fiber as a tangent vector."""
    x = bp.base
    v = to_tangent(m, bp).fiber
    n = m.dim
    zero = np.zeros(n)
    curv = riemann(m, x)
    X, Y = A.value, B.value
    if A.kind == "vertical" and B.kind == "vertical":
        return BundleTangent(zero, zero)
    if A.kind == "horizontal" and B.kind == "vertical":
        return BundleTangent(0.5 * slot_curvature(curv, slots, v, Y, X), base_connection(m, x, X, B))
    if A.kind == "vertical" and B.kind == "horizontal":
        return BundleTangent(0.5 * slot_curvature(curv, slots, v, X, Y), zero)
    return BundleTangent(base_connection(m, x, X, B), -0.5 * slot_curvature(curv, slots, X, Y, v))


def levi_civita_oracle(m: ManifoldModel, bp: BundlePoint, A: LiftedField, B: LiftedField) -> BundleTangent:
    """∇̃_A B from finite-difference Christoffel symbols of the explicit bundle metric."""
    bundle = sasaki_bundle_model(m, bp.kind)
    n = m.dim
    z = primal(bp.coordinates())

    def coords_of(field: LiftedField) -> Callable[[np.ndarray], np.ndarray]:
        def fn(w: np.ndarray) -> np.ndarray:
            point = BundlePoint(w[:n], w[n:], bp.kind)
            return to_coordinates(m, point, field.at(w[:n]))

        return fn

    a_coords = primal(coords_of(A)(z))
    b_val, b_jac = dual_jacobian(coords_of(B), z)
    gamma = christoffel_fd(bundle, z)
    dim = 2 * n
    nabla = primal(b_jac) @ a_coords + np.array([
        sum(gamma[k, i, j] * a_coords[i] * primal(b_val)[j] for i in range(dim) for j in range(dim))
        for k in range(dim)
    ])
    Z = from_coordinates(m, BundlePoint(z[:n], z[n:], bp.kind), nabla)
    return BundleTangent(primal(Z.horizontal), primal(Z.vertical))


def _tangent_norm(m: ManifoldModel, bp: BundlePoint, Z: BundleTangent) -> float:
    return float(np.sqrt(max(float(primal(sasaki_inner(m, bp, Z, Z))), 0.0)))


def random_lifted_field(rng: np.random.Generator, kind: str, x: np.ndarray) -> LiftedField:
    n = len(x)
    return LiftedField(kind, np.asarray(x, dtype=float), rng.normal(size=n), rng.normal(size=(n, n)))


@dataclass(frozen=True)
class SlotCalibration:
    choice: Optional[tuple[int, int, int]]
    unique: bool
    slot_residuals: dict[str, float]
    formula_residuals: dict[str, float]
    samples: int

    def as_dict(self) -> dict[str, Any]:
        return {
            "curvature_slot_choice": list(self.choice) if self.choice else None,
            "unique": self.unique,
            "slot_residuals": dict(self.slot_residuals),
            "formula_residuals": dict(self.formula_residuals),
            "samples": self.samples,
        }


def slot_label(slots: Sequence[int]) -> str:
    names = ("a", "b", "c")
    p = [names[s] for s in slots]
    return f"R({p[0]},{p[1]}){p[2]}"


def calibrate_curvature_slots(
    m: ManifoldModel,
    rng: np.random.Generator,
    samples: int = 50,
    tol: float = 1e-4,
    sample_point: Optional[Callable[[np.random.Generator], np.ndarray]] = None,
) -> SlotCalibration:
    """Pick the slot order of R_x(·,·,·) that makes the horizontal-horizontal formula hold.

    Every ordering is compared with the Levi-Civita connection of the explicit
    Sasaki metric on TM; the adopted one is then used to re-check the other
    three lift formulas.
    """
    if sample_point is None:
        def sample_point(r: np.random.Generator) -> np.ndarray:
            return np.array([r.uniform(0.3, np.pi - 0.3), r.uniform(-np.pi, np.pi)])

    cases = []
    for _ in range(samples):
        x = sample_point(rng)
        bp = BundlePoint(x, rng.normal(size=m.dim), BundleKind.TANGENT)
        cases.append((bp, random_lifted_field(rng, "horizontal", x), random_lifted_field(rng, "horizontal", x)))

    oracles = [levi_civita_oracle(m, bp, A, B) for bp, A, B in cases]
    slot_residuals: dict[str, float] = {}
    passing = []
    for slots in itertools.permutations(range(3)):
        worst = 0.0
        for (bp, A, B), oracle in zip(cases, oracles):
            got = sasaki_connection(m, bp, A, B, slots)
            worst = max(worst, _tangent_norm(m, bp, BundleTangent(primal(got.horizontal), primal(got.vertical)) - oracle))
        slot_residuals[slot_label(slots)] = worst
        if worst < tol:
            passing.append(tuple(slots))
    unique = len(passing) == 1
    choice = passing[0] if passing else None
    logger.info("curvature slot calibration: %d passing ordering(s), adopted %s", len(passing), choice)

    formula_residuals: dict[str, float] = {}
    if choice is not None:
        for a_kind, b_kind in (("vertical", "vertical"), ("horizontal", "vertical"), ("vertical", "horizontal"), ("horizontal", "horizontal")):
            worst = 0.0
            for bp, _, _ in cases:
                A = random_lifted_field(rng, a_kind, bp.base)
                B = random_lifted_field(rng, b_kind, bp.base)
                got = sasaki_connection(m, bp, A, B, choice)
                diff = BundleTangent(primal(got.horizontal), primal(got.vertical)) - levi_civita_oracle(m, bp, A, B)
                worst = max(worst, _tangent_norm(m, bp, diff))
            formula_residuals[f"{a_kind}-{b_kind}"] = worst
    return SlotCalibration(choice, unique, slot_residuals, formula_residuals, samples)


def tangent_bundle_of(section: Submanifold, kind: BundleKind = BundleKind.TANGENT) -> Submanifold:
    """TΣ (or T*Σ under I_g) as a submanifold of the bundle chart."""
    m = section.ambient
    n, k = m.dim, section.dim
    bundle = sasaki_bundle_model(m, kind)

    def param(q: np.ndarray) -> np.ndarray:
        s, eta = q[:k], q[k:]
        x = section.param(s)
        v = section.frame(s) @ eta
        fiber = flat(m, x, v) if kind is BundleKind.COTANGENT else v
        return pack(list(x) + list(fiber))

    def locate(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        s = np.asarray(section.locate(z[:n]), dtype=float)
        x = primal(section.param(s))
        E = primal(section.frame(s))
        g = primal(m.metric(x))
        v = z[n:] if kind is BundleKind.TANGENT else np.linalg.solve(g, z[n:])
        eta = np.linalg.solve(E.T @ g @ E, E.T @ g @ v)
        return np.concatenate([s, eta])

    return Submanifold(name=f"T{section.name}", ambient=bundle, dim=2 * k, param=param, locate=locate)


def tsigma_violation(
    section: Submanifold,
    rng: np.random.Generator,
    samples: int,
    sample_param: Callable[[np.random.Generator], np.ndarray],
) -> CheckResult:
    """Largest Sasaki second fundamental form of TΣ over random tangent pairs."""
    tsigma = tangent_bundle_of(section, BundleKind.TANGENT)
    bundle = tsigma.ambient
    result = CheckResult("tsigma-second-fundamental-form")
    for index in range(samples):
        s = np.asarray(sample_param(rng), dtype=float)
        q = np.concatenate([s, rng.normal(size=section.dim)])
        z = primal(tsigma.param(q))
        F = primal(tsigma.frame(q))
        u = F @ rng.normal(size=F.shape[1])
        w = F @ rng.normal(size=F.shape[1])
        u /= max(bundle.norm(z, u), 1e-300)
        w /= max(bundle.norm(z, w), 1e-300)
        B = second_fundamental_form(tsigma, z, u, w)
        result.record(bundle.norm(z, B), sample=index, point=z, u=u, w=w)
    return result


def parallel_lifted_field(m: ManifoldModel, kind: str, x: np.ndarray, value: np.ndarray) -> LiftedField:
    """Lift of a base field that is parallel to first order at x."""
    gamma = primal(christoffel(m, x))
    return LiftedField(kind, np.asarray(x, dtype=float), value, -np.einsum("kij,j->ki", gamma, value))


def tsigma_connection_residual(
    section: Submanifold,
    rng: np.random.Generator,
    samples: int,
    sample_param: Callable[[np.random.Generator], np.ndarray],
    slots: Sequence[int] = IDENTITY_SLOTS,
) -> CheckResult:
    """Normal part of ∇̃_A B from the lift formulas, for lifts of fields tangent to Σ.

    Fields are parallel along Σ, so both splitting components of ∇̃_A B must
    lie in T_xΣ when TΣ is totally geodesic.
    """
    m = section.ambient
    result = CheckResult("tsigma-lift-formulas")
    kinds = ("horizontal", "vertical")
    for index in range(samples):
        s = np.asarray(sample_param(rng), dtype=float)
        x = primal(section.param(s))
        E = primal(section.frame(s))
        bp = BundlePoint(x, E @ rng.normal(size=section.dim), BundleKind.TANGENT)
        for a_kind, b_kind in itertools.product(kinds, kinds):
            A = parallel_lifted_field(m, a_kind, x, E @ rng.normal(size=section.dim))
            B = parallel_lifted_field(m, b_kind, x, E @ rng.normal(size=section.dim))
            Z = sasaki_connection(m, bp, A, B, slots)
            residual = section.tangent_residual(x, primal(Z.horizontal)) + section.tangent_residual(x, primal(Z.vertical))
            result.record(residual, sample=index, pair=f"{a_kind}-{b_kind}")
    return result


def check_TSigma_totally_geodesic(
    ps: "PolarStructure",
    samples: int,
    rng: np.random.Generator,
    geodesic_time: float = 1.0,
    max_step: float = 1e-3,
    slots: Sequence[int] = IDENTITY_SLOTS,
) -> CheckResult:
    """Sasaki second fundamental form of TΣ, drift of geodesics launched tangent
    to Σ, and tangency of the lift formulas evaluated with the calibrated slots."""
    section = ps.section
    m = section.ambient
    result = tsigma_violation(section, rng, samples, ps.sample_section_param)
    drift = 0.0
    for _ in range(min(samples, 10)):
        s = ps.sample_section_param(rng)
        x = primal(section.param(s))
        v = primal(section.frame(s)) @ rng.normal(size=section.dim)
        v /= max(m.norm(x, v), 1e-300)
        try:
            y, _ = geodesic_flow(m, x, 0.25 * v, geodesic_time, max_step=max_step)
        except ChartExitError as exc:
            logger.debug("section geodesic skipped: %s", exc)
            continue
        drift = max(drift, section.distance(y))
    result.extra["section_geodesic_drift"] = drift
    result.record(drift, source="section-geodesic")
    lifts = tsigma_connection_residual(section, rng, min(samples, 10), ps.sample_section_param, slots)
    result.merge(lifts, "lift_formulas_")
    result.extra["curvature_slots"] = list(slots)
    return result

