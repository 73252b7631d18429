"""Chart-based Riemannian manifolds.

Everything here works on coordinate vectors that may hold dual numbers, so
derivatives of derived quantities (Christoffel symbols, generator fields,
frames) are available by nesting ``dual_jacobian``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from polarsym.errors import ChartDomainError, ChartExitError, NotTangentError, SingularMetricError
from polarsym.numcore import (
    FD_STEP,
    dual_jacobian,
    finite_diff_jacobian,
    mat_inv,
    pack,
    primal,
)

logger = logging.getLogger(__name__)

TANGENT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ManifoldModel:
    """A single-chart Riemannian manifold."""

    name: str
    dim: int
    metric_fn: Callable[[np.ndarray], np.ndarray]
    chart_domain: Callable[[np.ndarray], bool] = field(default=lambda x: True)
    constant_metric: bool = False
    # period of each coordinate, or None when the coordinate does not wrap
    periods: Optional[tuple[Optional[float], ...]] = None

    def metric(self, x: Sequence[Any]) -> np.ndarray:
        x = np.asarray(x)
        if x.dtype != object:
            x = x.astype(float)
        return self.metric_fn(x)

    def inverse_metric(self, x: Sequence[Any]) -> np.ndarray:
        g = self.metric(x)
        try:
            return mat_inv(g)
        except np.linalg.LinAlgError as exc:
            raise SingularMetricError(f"metric of {self.name} is singular at {primal(np.asarray(x, dtype=object))}") from exc

    def contains(self, x: Sequence[Any]) -> bool:
        xp = primal(np.asarray(x, dtype=object))
        return bool(np.all(np.isfinite(xp))) and bool(self.chart_domain(xp))

    def require(self, x: Sequence[Any]) -> None:
        if not self.contains(x):
            raise ChartDomainError(primal(np.asarray(x, dtype=object)).tolist(), self.name)

    def difference(self, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
        """Coordinate difference x - y, wrapped into (-p/2, p/2] for periodic coordinates."""
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        if self.periods:
            for i, p in enumerate(self.periods):
                if p:
                    d[i] = d[i] - p * np.round(d[i] / p)
        return d

    def inner(self, x: Sequence[Any], u: Any, v: Any) -> Any:
        return np.asarray(u) @ self.metric(x) @ np.asarray(v)

    def norm(self, x: Sequence[Any], u: Any) -> float:
        return math.sqrt(max(float(primal(self.inner(x, u, u))), 0.0))


def euclidean(dim: int, gram: Optional[np.ndarray] = None, name: str = "") -> ManifoldModel:
    gram = np.eye(dim) if gram is None else np.asarray(gram, dtype=float)
    return ManifoldModel(
        name=name or f"R{dim}",
        dim=dim,
        metric_fn=lambda x: gram.copy(),
        constant_metric=True,
    )


def round_sphere(band: float = 0.0) -> ManifoldModel:
    """Unit 2-sphere in the chart (θ, φ), poles removed; φ is 2π-periodic."""

    def metric(x: np.ndarray) -> np.ndarray:
        s = np.sin(x[0])
        return pack([[1.0, 0.0], [0.0, s * s]])

    return ManifoldModel(
        name="S2",
        dim=2,
        metric_fn=metric,
        chart_domain=lambda x: band < x[0] < math.pi - band,
        periods=(None, 2.0 * math.pi),
    )


def _metric_derivatives(m: ManifoldModel, x: Sequence[Any]) -> tuple[np.ndarray, np.ndarray]:
    # dg[i, j, l] = ∂_l g_ij
    g, dg = dual_jacobian(m.metric_fn, x)
    return np.asarray(g), np.asarray(dg)


def _christoffel_from(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    try:
        ginv = mat_inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError("metric is singular") from exc
    gamma = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for l in range(n):
                    acc = acc + ginv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l])
                gamma[k, i, j] = gamma[k, j, i] = 0.5 * acc
    return pack(gamma.tolist())


def christoffel(m: ManifoldModel, x: Sequence[Any]) -> np.ndarray:
    """Γ[k, i, j] = Γ^k_{ij} of the Levi-Civita connection."""
    m.require(x)
    if m.constant_metric:
        return np.zeros((m.dim, m.dim, m.dim))
    g, dg = _metric_derivatives(m, x)
    return _christoffel_from(g, dg)


def christoffel_fd(m: ManifoldModel, x: Sequence[float], step: float = FD_STEP) -> np.ndarray:
    """Christoffel symbols from central differences of the metric."""
    x = np.asarray(x, dtype=float)
    n = m.dim
    jac = finite_diff_jacobian(lambda y: m.metric(y).ravel(), x, step)
    dg = jac.reshape(n, n, n)
    return _christoffel_from(m.metric(x), dg).astype(float)


def _contract(gamma: np.ndarray, u: Any, v: Any) -> np.ndarray:
    """Γ(u, v)^k = Γ^k_{ij} u^i v^j."""
    n = gamma.shape[0]
    return pack([sum(gamma[k, i, j] * u[i] * v[j] for i in range(n) for j in range(n)) for k in range(n)])


@dataclass(frozen=True)
class CurvatureValue:
    """R^l_{ijk} stored as components[l, i, j, k]; R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l."""

    components: np.ndarray

    def apply(self, u: Any, v: Any, w: Any) -> np.ndarray:
        R = self.components
        n = R.shape[0]
        return pack([
            sum(R[l, i, j, k] * u[i] * v[j] * w[k] for i in range(n) for j in range(n) for k in range(n))
            for l in range(n)
        ])

    def antisymmetry_residual(self) -> float:
        R = primal(self.components)
        return float(np.max(np.abs(R + R.transpose(0, 2, 1, 3)))) if R.size else 0.0

    def bianchi_residual(self) -> float:
        R = primal(self.components)
        cyclic = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(cyclic))) if R.size else 0.0

    def sectional(self, g: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        g = primal(g)
        num = float(primal(self.apply(u, v, v)) @ g @ u)
        den = float((u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2)
        return num / den


def riemann(m: ManifoldModel, x: Sequence[Any]) -> CurvatureValue:
    m.require(x)
    n = m.dim
    if m.constant_metric:
        return CurvatureValue(np.zeros((n, n, n, n)))
    gamma, dgamma = dual_jacobian(lambda y: christoffel(m, y), x)
    # dgamma[l, j, k, i] = ∂_i Γ^l_{jk}
    R = np.empty((n, n, n, n), dtype=object)
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    acc = dgamma[l, j, k, i] - dgamma[l, i, k, j]
                    for p in range(n):
                        acc = acc + gamma[l, i, p] * gamma[p, j, k] - gamma[l, j, p] * gamma[p, i, k]
                    R[l, i, j, k] = acc
    return CurvatureValue(pack(R.tolist()))


def covariant_derivative(m: ManifoldModel, x: Sequence[Any], field_fn: Callable[[np.ndarray], np.ndarray], u: Any) -> np.ndarray:
    """∇_u Y at x for a vector field Y given as a coordinate function."""
    Y, DY = dual_jacobian(field_fn, x)
    gamma = christoffel(m, x)
    return pack(list(np.asarray(DY) @ np.asarray(u) + _contract(gamma, u, Y)))


def killing_residual(m: ManifoldModel, x: Sequence[float], field_fn: Callable[[np.ndarray], np.ndarray], u: np.ndarray, v: np.ndarray) -> float:
    """⟨∇_u X, v⟩ + ⟨∇_v X, u⟩, which vanishes for Killing fields."""
    g = m.metric(x)
    a = covariant_derivative(m, x, field_fn, u)
    b = covariant_derivative(m, x, field_fn, v)
    return float(primal(a @ g @ v + b @ g @ u))


@dataclass(frozen=True, eq=False)
class Submanifold:
    """A parametrized submanifold s ↦ param(s) of an ambient chart."""

    name: str
    ambient: ManifoldModel
    dim: int
    param: Callable[[np.ndarray], np.ndarray]
    # nearest parameter for a point on (or near) the submanifold
    locate: Callable[[np.ndarray], np.ndarray]

    def point(self, s: Sequence[Any]) -> np.ndarray:
        return self.param(np.asarray(s))

    def frame(self, s: Sequence[Any]) -> np.ndarray:
        """Columns are ∂param/∂s_a (n × k)."""
        _, jac = dual_jacobian(self.param, s)
        return np.asarray(jac).reshape(self.ambient.dim, self.dim)

    def tangent_basis(self, x: Sequence[float]) -> np.ndarray:
        return primal(self.frame(self.locate(np.asarray(x, dtype=float))))

    def distance(self, x: Sequence[float]) -> float:
        x = np.asarray(x, dtype=float)
        d = self.ambient.difference(x, primal(self.param(self.locate(x))))
        return self.ambient.norm(x, d)

    def tangent_projection(self, x: Sequence[float], w: np.ndarray) -> np.ndarray:
        """g-orthogonal projection of w onto T_xΣ."""
        E = self.tangent_basis(x)
        g = primal(self.ambient.metric(x))
        gram = E.T @ g @ E
        return E @ np.linalg.solve(gram, E.T @ g @ np.asarray(w, dtype=float))

    def tangent_residual(self, x: Sequence[float], w: np.ndarray) -> float:
        w = np.asarray(w, dtype=float)
        return self.ambient.norm(x, w - self.tangent_projection(x, w))


def second_fundamental_form(s: Submanifold, x: Sequence[float], u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Normal part of ∇_u V where V extends v with constant frame coefficients."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    for w in (u, v):
        residual = s.tangent_residual(x, w)
        if residual > TANGENT_TOL * max(1.0, float(np.linalg.norm(w))):
            raise NotTangentError(residual)
    m = s.ambient
    sigma = np.asarray(s.locate(x), dtype=float)
    E = primal(s.frame(sigma))
    g = primal(m.metric(x))
    gram = E.T @ g @ E
    a = np.linalg.solve(gram, E.T @ g @ u)
    c = np.linalg.solve(gram, E.T @ g @ v)
    _, dframe = dual_jacobian(lambda t: s.frame(t) @ c, sigma)
    directional = primal(dframe) @ a
    nabla = directional + primal(_contract(christoffel(m, x), u, v))
    return nabla - s.tangent_projection(x, nabla)


def geodesic_rhs(m: ManifoldModel, x: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return v, -primal(_contract(christoffel(m, x), v, v))


def _rk4(m: ManifoldModel, x: np.ndarray, v: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    k1x, k1v = geodesic_rhs(m, x, v)
    k2x, k2v = geodesic_rhs(m, x + 0.5 * h * k1x, v + 0.5 * h * k1v)
    k3x, k3v = geodesic_rhs(m, x + 0.5 * h * k2x, v + 0.5 * h * k2v)
    k4x, k4v = geodesic_rhs(m, x + h * k3x, v + h * k3v)
    return (
        x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x),
        v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v),
    )


def _attempt_step(
    m: ManifoldModel, x: np.ndarray, v: np.ndarray, h: float
) -> Optional[tuple[np.ndarray, np.ndarray, float]]:
    """One RK4 step with its end energy, or None when any stage leaves the chart."""
    if not m.contains(x + h * v):
        return None
    try:
        x_new, v_new = _rk4(m, x, v, h)
    except ChartDomainError:
        return None
    if not m.contains(x_new):
        return None
    return x_new, v_new, float(v_new @ primal(m.metric(x_new)) @ v_new)


def geodesic_flow(
    m: ManifoldModel,
    x: Sequence[float],
    v: Sequence[float],
    t: float,
    max_step: float = 1e-3,
    energy_tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the geodesic equation with RK4.

    Steps never exceed ``max_step``; a step whose energy change exceeds
    ``energy_tol`` (relative) is halved, down to ``max_step / 64`` where it
    is accepted. A step that still leaves the chart at that size raises
    ChartExitError.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    m.require(x)
    if m.constant_metric:
        return x + t * v, v.copy()
    direction = 1.0 if t >= 0 else -1.0
    remaining = abs(t)
    elapsed = 0.0
    floor = max_step / 64
    energy = float(v @ primal(m.metric(x)) @ v)
    h_nominal = min(max_step, remaining) if remaining else 0.0
    while remaining > 1e-15:
        h = min(h_nominal, remaining)
        while True:
            step = _attempt_step(m, x, v, direction * h)
            if step is not None and (abs(step[2] - energy) <= energy_tol * max(1.0, energy) or h <= floor):
                break
            if h <= floor:
                raise ChartExitError(elapsed, x.tolist())
            h *= 0.5
        x, v, energy = step
        elapsed += h
        remaining -= h
    logger.debug("geodesic on %s integrated to t=%s", m.name, t)
    return x, v
