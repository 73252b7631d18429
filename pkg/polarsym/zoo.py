"""Built-in polar actions, addressed by stable string names."""

from __future__ import annotations

import itertools
import logging
import math
import re
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from polarsym.config import Settings
from polarsym.errors import ConfigError
from polarsym.geometry import ManifoldModel, Submanifold, euclidean, round_sphere
from polarsym.hamilton import ObservableFn
from polarsym.liegroups import (
    Action,
    GroupElement,
    MatrixGroup,
    hat,
    linear_action,
    rotation,
    so2,
    so3,
    torus,
)
from polarsym.numcore import atan2, pack, primal
from polarsym.polar import LinearData, PolarStructure
from polarsym.sasaki import BundlePoint, sharp

logger = logging.getLogger(__name__)

EXAMPLE_NAMES: tuple[str, ...] = ("so2-r2", "so3-adj", "so3-sym0", "torus-c2", "s1-s2")
CLUSTER_TOL = 1e-9

_TORUS_NAME = re.compile(r"^torus-c(\d+)$")


def _frac_matrix(rows: list[list[int | Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(c) for c in row) for row in rows)


def _identity_rows(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def linear_section(name: str, manifold: ManifoldModel, P: np.ndarray) -> Submanifold:
    """Σ = column span of P, with the g-orthogonal projection as ``locate``."""
    P = np.asarray(P, dtype=float)
    k = P.shape[1]

    def param(s: np.ndarray) -> np.ndarray:
        return P @ s

    def locate(x: np.ndarray) -> np.ndarray:
        g = primal(manifold.metric(x))
        return np.linalg.solve(P.T @ g @ P, P.T @ g @ np.asarray(x, dtype=float))

    return Submanifold(name=name, ambient=manifold, dim=k, param=param, locate=locate)


def _away_from_zero(value: float, margin: float) -> float:
    if abs(value) >= margin:
        return value
    return math.copysign(margin, value if value != 0 else 1.0)


def _gaussian_sampler(dim: int, margin: float) -> Callable[[np.random.Generator], np.ndarray]:
    def sample(rng: np.random.Generator) -> np.ndarray:
        while True:
            x = rng.normal(size=dim)
            if np.linalg.norm(x) >= margin:
                return x

    return sample


# --- SO(2) on R² ----------------------------------------------------------


def so2_r2(margin: float = 1e-3) -> PolarStructure:
    group = so2()
    manifold = euclidean(2, name="R2")
    action = linear_action(group, manifold, lambda g: g, name="SO(2) on R2")
    section = linear_section("x-axis", manifold, np.array([[1.0], [0.0]]))

    def canonicalize(x: np.ndarray) -> tuple[GroupElement, np.ndarray]:
        theta = math.atan2(x[1], x[0]) if np.linalg.norm(x) > 0 else 0.0
        return group.element(rotation(-theta)), np.array([float(np.hypot(x[0], x[1])), 0.0])

    def slice_step(bp: BundlePoint) -> GroupElement:
        x = primal(bp.base)
        xi = primal(bp.fiber)
        if np.linalg.norm(x) > CLUSTER_TOL or np.linalg.norm(xi) == 0:
            return group.identity()
        return group.element(rotation(-math.atan2(xi[1], xi[0])))

    def sample_param(rng: np.random.Generator) -> np.ndarray:
        return np.array([_away_from_zero(rng.normal(), margin)])

    return PolarStructure(
        name="so2-r2",
        action=action,
        section=section,
        weyl_elements=(group.identity(), group.element(rotation(math.pi))),
        canonicalize=canonicalize,
        sample_point=_gaussian_sampler(2, margin),
        sample_section_param=sample_param,
        principal_isotropy_dim=0,
        expected_weyl_order=2,
        slice_step=slice_step,
        linear=LinearData(
            section_matrix=_frac_matrix([[1], [0]]),
            gram=_frac_matrix(_identity_rows(2)),
            generator_files=((1, "so2_r2_m1.txt"), (2, "so2_r2_m2.txt")),
        ),
        singular_section_params=((0.0,),),
    )


# --- SO(3) on so(3) ≅ R³ ------------------------------------------------------


def rotation_to_axis(v: np.ndarray) -> np.ndarray:
    """A rotation R with R v = |v| e₃ (identity for v = 0)."""
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(v))
    if r == 0.0:
        return np.eye(3)
    u = v / r
    e3 = np.array([0.0, 0.0, 1.0])
    k = np.cross(u, e3)
    s = float(np.linalg.norm(k))
    c = float(u @ e3)
    if s < 1e-12:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    K = hat(k / s)
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)


def so3_adj(margin: float = 1e-3) -> PolarStructure:
    group = so3()
    manifold = euclidean(3, name="so(3)")
    action = linear_action(group, manifold, lambda g: g, name="SO(3) adjoint")
    section = linear_section("z-axis", manifold, np.array([[0.0], [0.0], [1.0]]))

    def canonicalize(x: np.ndarray) -> tuple[GroupElement, np.ndarray]:
        return group.element(rotation_to_axis(x)), np.array([0.0, 0.0, float(np.linalg.norm(x))])

    def slice_step(bp: BundlePoint) -> GroupElement:
        # only the origin has isotropy that can move ξ off the axis
        if np.linalg.norm(primal(bp.base)) > CLUSTER_TOL:
            return group.identity()
        return group.element(rotation_to_axis(primal(bp.fiber)))

    def sample_param(rng: np.random.Generator) -> np.ndarray:
        return np.array([_away_from_zero(rng.normal(), margin)])

    return PolarStructure(
        name="so3-adj",
        action=action,
        section=section,
        weyl_elements=(group.identity(), group.element(np.diag([1.0, -1.0, -1.0]))),
        canonicalize=canonicalize,
        sample_point=_gaussian_sampler(3, margin),
        sample_section_param=sample_param,
        principal_isotropy_dim=1,
        expected_weyl_order=2,
        slice_step=slice_step,
        linear=LinearData(
            section_matrix=_frac_matrix([[0], [0], [1]]),
            gram=_frac_matrix(_identity_rows(3)),
            generator_files=((1, "so3_adj_m1.txt"), (2, "so3_adj_m2.txt")),
        ),
        singular_section_params=((0.0,),),
    )


# --- SO(3) on traceless symmetric 3×3 matrices ------------------------------
# coordinates (a, b, p, q, r) ↔ [[a, p, q], [p, b, r], [q, r, −a−b]]

SYM0_GRAM = [[2, 1, 0, 0, 0], [1, 2, 0, 0, 0], [0, 0, 2, 0, 0], [0, 0, 0, 2, 0], [0, 0, 0, 0, 2]]


def sym0_matrix(x: np.ndarray) -> np.ndarray:
    a, b, p, q, r = x
    return pack([[a, p, q], [p, b, r], [q, r, -a - b]])


def sym0_coords(A: np.ndarray) -> np.ndarray:
    return pack([A[0, 0], A[1, 1], A[0, 1], A[0, 2], A[1, 2]])


def _sym0_basis() -> list[np.ndarray]:
    return [sym0_matrix(np.eye(5)[i]) for i in range(5)]


def sym0_representation(g: np.ndarray) -> np.ndarray:
    """Coordinate matrix of A ↦ g A gᵀ; column i is the image of the i-th basis matrix."""
    g = np.asarray(g)
    cols = [sym0_coords(g @ E @ g.T) for E in _sym0_basis()]
    return pack([[c[i] for c in cols] for i in range(5)])


def _signed_permutations() -> list[np.ndarray]:
    out = []
    for perm in itertools.permutations(range(3)):
        P = np.eye(3)[list(perm)]
        out.append(P if np.linalg.det(P) > 0 else -P)
    return out


def _clusters(values: np.ndarray, scale: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and abs(values[groups[-1][-1]] - v) <= CLUSTER_TOL * max(1.0, scale):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def so3_sym0(margin: float = 1e-3) -> PolarStructure:
    group = so3()
    manifold = euclidean(5, gram=np.array(SYM0_GRAM, dtype=float), name="Sym0(3)")
    action = linear_action(group, manifold, sym0_representation, name="SO(3) on Sym0(3)")
    P = np.zeros((5, 2))
    P[0, 0] = P[1, 1] = 1.0
    section = linear_section("diagonal", manifold, P)

    def canonicalize(x: np.ndarray) -> tuple[GroupElement, np.ndarray]:
        w, U = np.linalg.eigh(primal(sym0_matrix(x)))
        order = np.argsort(w)[::-1]
        w, U = w[order], U[:, order]
        h = U.T.copy()
        if np.linalg.det(h) < 0:
            h[2] *= -1.0
        return group.element(h), np.array([w[0], w[1], 0.0, 0.0, 0.0])

    def slice_step(bp: BundlePoint) -> GroupElement:
        """Diagonalize ξ^♯ inside each eigenvalue cluster of the (diagonal) base point."""
        x = primal(bp.base)
        diag = np.array([x[0], x[1], -x[0] - x[1]])
        Y = primal(sym0_matrix(primal(sharp(manifold, x, primal(bp.fiber)))))
        order = np.argsort(diag)[::-1]
        Q = np.eye(3)
        flip_row = None
        for cluster in _clusters(diag[order], float(np.max(np.abs(diag)))):
            idx = order[cluster]
            if len(idx) == 1:
                continue
            _, V = np.linalg.eigh(Y[np.ix_(idx, idx)])
            Q[np.ix_(idx, idx)] = V.T
            flip_row = idx[0]
        if np.linalg.det(Q) < 0 and flip_row is not None:
            Q[flip_row] *= -1.0
        return group.element(Q)

    def sample_param(rng: np.random.Generator) -> np.ndarray:
        while True:
            a, b = rng.normal(size=2)
            d = np.array([a, b, -a - b])
            gaps = [abs(d[i] - d[j]) for i in range(3) for j in range(i + 1, 3)]
            if min(gaps) >= margin:
                return np.array([a, b])

    return PolarStructure(
        name="so3-sym0",
        action=action,
        section=section,
        weyl_elements=tuple(group.element(w) for w in _signed_permutations()),
        canonicalize=canonicalize,
        sample_point=_gaussian_sampler(5, margin),
        sample_section_param=sample_param,
        principal_isotropy_dim=0,
        expected_weyl_order=6,
        slice_step=slice_step,
        linear=LinearData(
            section_matrix=_frac_matrix([[1, 0], [0, 1], [0, 0], [0, 0], [0, 0]]),
            gram=_frac_matrix(SYM0_GRAM),
            generator_files=((1, "so3_sym0_m1.txt"), (2, "so3_sym0_m2.txt")),
        ),
        singular_section_params=((1.0, 1.0), (0.0, 0.0)),
    )


# --- T^n on C^n ≅ R^{2n} ----------------------------------------------------


def _block_rotation(angles: np.ndarray) -> np.ndarray:
    n = len(angles)
    g = np.zeros((2 * n, 2 * n))
    for k, t in enumerate(angles):
        g[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = rotation(t)
    return g


def torus_cn(n: int, margin: float = 1e-3) -> PolarStructure:
    if n < 1:
        raise ConfigError(f"torus example needs n >= 1, got {n}")
    group: MatrixGroup = torus(n)
    manifold = euclidean(2 * n, name=f"C{n}")
    action = linear_action(group, manifold, lambda g: g, name=f"T^{n} on C^{n}")
    P = np.zeros((2 * n, n))
    for k in range(n):
        P[2 * k, k] = 1.0
    section = linear_section("real points", manifold, P)

    def canonicalize(x: np.ndarray) -> tuple[GroupElement, np.ndarray]:
        angles = np.array([math.atan2(x[2 * k + 1], x[2 * k]) for k in range(n)])
        target = np.zeros(2 * n)
        target[0::2] = np.hypot(x[0::2], x[1::2])
        return group.element(_block_rotation(-angles)), target

    def slice_step(bp: BundlePoint) -> GroupElement:
        x = primal(bp.base)
        xi = primal(bp.fiber)
        angles = np.zeros(n)
        for k in range(n):
            if abs(x[2 * k]) <= CLUSTER_TOL and np.hypot(xi[2 * k], xi[2 * k + 1]) > 0:
                angles[k] = -math.atan2(xi[2 * k + 1], xi[2 * k])
        return group.element(_block_rotation(angles))

    def sample_param(rng: np.random.Generator) -> np.ndarray:
        return np.array([_away_from_zero(v, margin) for v in rng.normal(size=n)])

    weyl = tuple(
        group.element(_block_rotation(np.pi * np.array(signs))) for signs in itertools.product((0, 1), repeat=n)
    )
    files = ((1, "torus_c2_m1.txt"), (2, "torus_c2_m2.txt")) if n == 2 else ()
    return PolarStructure(
        name=f"torus-c{n}",
        action=action,
        section=section,
        weyl_elements=weyl,
        canonicalize=canonicalize,
        sample_point=_gaussian_sampler(2 * n, margin),
        sample_section_param=sample_param,
        principal_isotropy_dim=0,
        expected_weyl_order=2**n,
        slice_step=slice_step,
        linear=LinearData(
            section_matrix=_frac_matrix(P.astype(int).tolist()),
            gram=_frac_matrix(_identity_rows(2 * n)),
            generator_files=files,
        ),
        singular_section_params=(tuple([0.0] * n), tuple([1.0] + [0.0] * (n - 1))),
    )


# --- S¹ rotating the round S² about the z-axis ------------------------------


def s1_s2(margin: float = 1e-3, band: float = 1e-2) -> PolarStructure:
    group = so2()
    manifold = round_sphere(band)

    def act(g: np.ndarray, x: np.ndarray) -> np.ndarray:
        return pack([x[0], x[1] + atan2(g[1, 0], g[0, 0])])

    action = Action(group=group, manifold=manifold, act_fn=act, name="S1 on S2")

    def param(s: np.ndarray) -> np.ndarray:
        # signed colatitude: s > 0 on the φ = 0 half-meridian, s < 0 on φ = π
        return pack([abs(s[0]), 0.0 if primal(s[0]) >= 0 else math.pi])

    def locate(x: np.ndarray) -> np.ndarray:
        return np.array([x[0] if math.cos(x[1]) >= 0 else -x[0]])

    section = Submanifold(name="meridian", ambient=manifold, dim=1, param=param, locate=locate)
    lo, hi = band + margin, math.pi - band - margin

    def canonicalize(x: np.ndarray) -> tuple[GroupElement, np.ndarray]:
        return group.element(rotation(-x[1])), np.array([x[0], 0.0])

    def sample_point(rng: np.random.Generator) -> np.ndarray:
        return np.array([rng.uniform(lo, hi), rng.uniform(-math.pi, math.pi)])

    def sample_param(rng: np.random.Generator) -> np.ndarray:
        return np.array([rng.uniform(lo, hi) * rng.choice((-1.0, 1.0))])

    def kinetic(x: np.ndarray, xi: np.ndarray):
        s = np.sin(x[0])
        return 0.5 * (xi[0] * xi[0] + xi[1] * xi[1] / (s * s))

    invariants = (
        ObservableFn("height", lambda x, xi: np.cos(x[0])),
        ObservableFn("polar-momentum", lambda x, xi: xi[0]),
        ObservableFn("kinetic", kinetic),
        ObservableFn("axial-momentum", lambda x, xi: xi[1]),
    )
    return PolarStructure(
        name="s1-s2",
        action=action,
        section=section,
        weyl_elements=(group.identity(), group.element(rotation(math.pi))),
        canonicalize=canonicalize,
        sample_point=sample_point,
        sample_section_param=sample_param,
        principal_isotropy_dim=0,
        expected_weyl_order=2,
        invariants=invariants,
    )


def get_example(name: str, settings: Optional[Settings] = None) -> PolarStructure:
    """Construct a registered example; unknown names raise ConfigError."""
    settings = settings or Settings()
    margin = settings.sample_margin
    if name == "so2-r2":
        return so2_r2(margin)
    if name == "so3-adj":
        return so3_adj(margin)
    if name == "so3-sym0":
        return so3_sym0(margin)
    if name == "s1-s2":
        return s1_s2(margin, settings.chart_band)
    match = _TORUS_NAME.match(name)
    if match:
        return torus_cn(int(match.group(1)), margin)
    raise ConfigError(f"unknown example {name!r}; known: {', '.join(EXAMPLE_NAMES)} (torus-c<n> for any n >= 1)")


def is_known_example(name: str) -> bool:
    return name in EXAMPLE_NAMES or bool(_TORUS_NAME.match(name))
