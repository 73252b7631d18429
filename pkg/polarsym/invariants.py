"""Invariant polynomials, restriction to sections and exact surjectivity certificates.

Polynomials on 𝔭^m use m copies of the representation coordinates in order
(x1..xn, y1..yn, ...); the second copy stands for ξ^♯. Restrictions live on
Σ^m with variables (a1..ak, b1..bk, ...). All certificate arithmetic is over
the rationals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np
from sympy import Matrix
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from polarsym.errors import (
    ConfigError,
    ExtensionError,
    NonLinearActionError,
    PreconditionError,
    VariableMismatchError,
)
from polarsym.hamilton import (
    ObservableFn,
    invariance_residual,
    poisson_bracket,
    random_cotangent_point,
    sample_zero_level,
)
from polarsym.liegroups import haar_sample
from polarsym.numcore import null_space, primal
from polarsym.polar import (
    LinearData,
    PolarStructure,
    WeylGroup,
    bundle_distance,
    compute_weyl_group,
    project_covector,
    restrict_observable,
    sample_section_covector,
    section_covector_coordinates,
    section_model,
)
from polarsym.polynomials import MultiPoly, exponents_of_degree, monomial, poly_poisson_bracket, products_of_degree
from polarsym.sasaki import BundleKind, BundlePoint, sharp
from polarsym.utils import CheckResult

logger = logging.getLogger(__name__)

GENERATOR_DIR = Path(__file__).resolve().parent / "generators"
COPY_PREFIXES = "xyzuvw"
SECTION_PREFIXES = "abcdef"
RATIONAL_TOL = 1e-9
SEPARATION_GAP = 1e-3
SEPARATION_MIN = 1e-6
# fewer zero-level points than products leaves spurious null combinations
IDEAL_MIN_SAMPLES = 60

WeylLike = Union[WeylGroup, Sequence[Sequence[Sequence[Any]]]]


def copy_variables(n: int, m: int) -> tuple[str, ...]:
    return tuple(f"{COPY_PREFIXES[c]}{i + 1}" for c in range(m) for i in range(n))


def section_variables(k: int, m: int) -> tuple[str, ...]:
    return tuple(f"{SECTION_PREFIXES[c]}{i + 1}" for c in range(m) for i in range(k))


def _is_homogeneous(p: MultiPoly) -> bool:
    return len({sum(e) for e in p.terms}) <= 1


@dataclass(frozen=True)
class InvariantBasis:
    group_tag: str
    m: int
    degree_bound: int
    variables: tuple[str, ...]
    generators: tuple[MultiPoly, ...]
    names: tuple[str, ...]

    def without(self, name: str) -> "InvariantBasis":
        keep = [i for i, n in enumerate(self.names) if n != name]
        if len(keep) == len(self.names):
            raise KeyError(name)
        return InvariantBasis(
            self.group_tag,
            self.m,
            self.degree_bound,
            self.variables,
            tuple(self.generators[i] for i in keep),
            tuple(self.names[i] for i in keep),
        )

    def generator(self, name: str) -> MultiPoly:
        return self.generators[self.names.index(name)]


@dataclass(frozen=True)
class GradedCertificate:
    degree: int
    target_dim: int
    achieved_dim: int
    max_residual: Fraction = Fraction(0)
    missing: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.achieved_dim == self.target_dim and self.max_residual == 0

    def as_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "target_dim": self.target_dim,
            "achieved_dim": self.achieved_dim,
            "max_residual": str(self.max_residual),
            "passed": self.passed,
            "missing": list(self.missing),
        }


def load_generator_file(path: Union[str, Path]) -> InvariantBasis:
    """Parse a generator list.

    Header lines ``group:``, ``m:``, ``degree_bound:`` and ``variables:``
    come first, then one ``name = e1,e2,...:coef ...`` line per generator.
    ``#`` starts a comment. Generators must be homogeneous.
    """
    path = Path(path)
    header: dict[str, str] = {}
    names: list[str] = []
    texts: list[tuple[int, str]] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            name, _, body = line.partition("=")
            names.append(name.strip())
            texts.append((lineno, body.strip()))
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ConfigError(f"{path.name}:{lineno}: expected 'key: value' or 'name = terms'")
        header[key.strip()] = value.strip()
    missing = [k for k in ("group", "m", "degree_bound", "variables") if k not in header]
    if missing:
        raise ConfigError(f"{path.name}: missing header field(s) {', '.join(missing)}")
    try:
        m = int(header["m"])
        bound = int(header["degree_bound"])
    except ValueError as exc:
        raise ConfigError(f"{path.name}: m and degree_bound must be integers") from exc
    variables = tuple(v.strip() for v in header["variables"].split(",") if v.strip())
    gens = []
    for (lineno, text), name in zip(texts, names):
        try:
            p = MultiPoly.from_text(text, variables)
        except ValueError as exc:
            raise ConfigError(f"{path.name}:{lineno}: {exc}") from exc
        if not _is_homogeneous(p):
            raise ConfigError(f"{path.name}:{lineno}: generator {name!r} is not homogeneous")
        gens.append(p)
    if len(set(names)) != len(names):
        raise ConfigError(f"{path.name}: duplicate generator names")
    return InvariantBasis(header["group"], m, bound, variables, tuple(gens), tuple(names))


def dump_generator_file(basis: InvariantBasis) -> str:
    lines = [
        f"group: {basis.group_tag}",
        f"m: {basis.m}",
        f"degree_bound: {basis.degree_bound}",
        f"variables: {','.join(basis.variables)}",
    ]
    lines += [f"{name} = {p.to_text()}" for name, p in zip(basis.names, basis.generators)]
    return "\n".join(lines) + "\n"


def _require_linear(ps: PolarStructure) -> LinearData:
    if ps.linear is None:
        raise NonLinearActionError(f"{ps.name} is not a linear representation")
    return ps.linear


def builtin_basis(ps: PolarStructure, m: int) -> InvariantBasis:
    lin = _require_linear(ps)
    filename = lin.generator_file(m)
    if filename is None:
        raise ConfigError(f"no generator list for {ps.name} with m={m}")
    basis = load_generator_file(GENERATOR_DIR / filename)
    if len(basis.variables) != lin.dim * m:
        raise ConfigError(f"{filename}: expected {lin.dim * m} variables, found {len(basis.variables)}")
    return basis


def _rationalize(value: float) -> Fraction:
    frac = Fraction(float(value)).limit_denominator(1000)
    if abs(float(frac) - float(value)) > RATIONAL_TOL:
        raise NonLinearActionError(f"entry {value!r} is not a small rational")
    return frac


def _exact_matrices(W: WeylLike, nvars: int) -> list[list[list[Fraction]]]:
    raw = W.action_on_section if isinstance(W, WeylGroup) else W
    out = []
    for M in raw:
        rows = [[_rationalize(primal(c)) if not isinstance(c, (int, Fraction)) else Fraction(c) for c in row] for row in M]
        size = len(rows)
        if size == 0 or any(len(r) != size for r in rows) or nvars % size:
            raise NonLinearActionError(f"a {size}x{size} map cannot act on {nvars} variables")
        copies = nvars // size
        block = [[Fraction(0)] * nvars for _ in range(nvars)]
        for c in range(copies):
            for i in range(size):
                for j in range(size):
                    block[c * size + i][c * size + j] = rows[i][j]
        out.append(block)
    return out


def reynolds_finite(p: MultiPoly, W: WeylLike) -> MultiPoly:
    """(1/|W|) Σ_w p∘w, with w acting diagonally on every copy of Σ."""
    mats = _exact_matrices(W, len(p.variables))
    total = MultiPoly(p.variables)
    for w in mats:
        total = total + p.linear_substitute(w)
    return total / len(mats)


def restrict_poly(p: MultiPoly, ps: PolarStructure) -> MultiPoly:
    """p ∘ (Σ^m ↪ 𝔭^m)."""
    lin = _require_linear(ps)
    n, k = lin.dim, lin.section_dim
    if len(p.variables) % n:
        raise VariableMismatchError(p.variables, copy_variables(n, max(1, len(p.variables) // n)))
    m = len(p.variables) // n
    svars = section_variables(k, m)
    images = []
    for c in range(m):
        for i in range(n):
            coeffs: list[Fraction] = [Fraction(0)] * (m * k)
            for j in range(k):
                coeffs[c * k + j] = lin.section_matrix[i][j]
            images.append(MultiPoly.linear(coeffs, svars))
    return p.compose(images)


def section_weyl(ps: PolarStructure) -> WeylGroup:
    return compute_weyl_group(ps)


# --- exact linear algebra over QQ ---------------------------------------------


def _to_qq(rows: list[list[Fraction]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[QQ(c.numerator, c.denominator) for c in row] for row in rows], (len(rows), ncols), QQ)


def _from_matrix(mat: Matrix, nrows: int) -> list[list[Fraction]]:
    return [[Fraction(int(v.p), int(v.q)) for v in mat.row(i)] for i in range(nrows)]


def _row_echelon(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    if not rows:
        return [], []
    R, pivots = _to_qq(rows, ncols).rref()
    return _from_matrix(R.to_Matrix(), len(pivots)), list(pivots)


def _reduce(vec: list[Fraction], echelon: list[list[Fraction]], pivots: list[int]) -> list[Fraction]:
    out = list(vec)
    for row, piv in zip(echelon, pivots):
        if out[piv]:
            factor = out[piv]
            out = [a - factor * b for a, b in zip(out, row)]
    return out


def _vector(p: MultiPoly, basis: list[tuple[int, ...]]) -> list[Fraction]:
    return [p.coefficient(e) for e in basis]


def _graded_products(gens: Sequence[MultiPoly], variables: tuple[str, ...], degree: int) -> list[tuple[tuple[int, ...], MultiPoly]]:
    if degree == 0:
        return [((0,) * len(gens), MultiPoly.constant(1, variables))]
    return list(products_of_degree(list(gens), degree))


def invariant_target(ps: PolarStructure, m: int, degree: int, weyl: Optional[WeylGroup] = None) -> tuple[list[list[Fraction]], list[tuple[int, ...]]]:
    """Exact basis (as coefficient rows) of Π-invariants of one degree on Σ^m."""
    lin = _require_linear(ps)
    weyl = weyl or section_weyl(ps)
    svars = section_variables(lin.section_dim, m)
    mono_basis = list(exponents_of_degree(len(svars), degree))
    rows = [_vector(reynolds_finite(monomial(e, svars), weyl), mono_basis) for e in mono_basis]
    echelon, _ = _row_echelon(rows, len(mono_basis))
    return echelon, mono_basis


def certify_surjectivity(
    ps: PolarStructure,
    m: int,
    basis: InvariantBasis,
    degree: int,
    weyl: Optional[WeylGroup] = None,
) -> GradedCertificate:
    """Is every degree-d Π-invariant on Σ^m a polynomial in the restricted generators?"""
    if degree > basis.degree_bound:
        raise PreconditionError(f"degree {degree} exceeds the generator list's bound {basis.degree_bound}")
    lin = _require_linear(ps)
    svars = section_variables(lin.section_dim, m)
    target, mono_basis = invariant_target(ps, m, degree, weyl)
    restricted = [restrict_poly(g, ps) for g in basis.generators]
    products = _graded_products(restricted, svars, degree)
    rows = [_vector(p, mono_basis) for _, p in products]
    echelon, pivots = _row_echelon(rows, len(mono_basis))
    worst = Fraction(0)
    missing = []
    for t in target:
        rest = _reduce(t, echelon, pivots)
        size = max((abs(c) for c in rest), default=Fraction(0))
        if size:
            missing.append(str(MultiPoly(svars, dict(zip(mono_basis, t)))))
        worst = max(worst, size)
    cert = GradedCertificate(degree, len(target), len(pivots), worst, tuple(missing))
    logger.debug("certificate %s m=%d degree %d: %s", ps.name, m, degree, cert.as_dict())
    return cert


def extend_invariant(ps: PolarStructure, m: int, f: MultiPoly, basis: InvariantBasis) -> MultiPoly:
    """F, a polynomial in the generators, with restrict_poly(F) = f."""
    lin = _require_linear(ps)
    svars = section_variables(lin.section_dim, m)
    if f.variables != svars:
        raise VariableMismatchError(f.variables, svars)
    restricted = [restrict_poly(g, ps) for g in basis.generators]
    F = MultiPoly(basis.variables)
    for degree in sorted({sum(e) for e in f.terms}):
        part = f.homogeneous_part(degree)
        mono_basis = list(exponents_of_degree(len(svars), degree))
        products = _graded_products(restricted, svars, degree)
        ncols = len(products) + 1
        rows = [[p.coefficient(e) for _, p in products] + [part.coefficient(e)] for e in mono_basis]
        echelon, pivots = _row_echelon(rows, ncols)
        if ncols - 1 in pivots:
            span_rows, span_pivots = _row_echelon([_vector(p, mono_basis) for _, p in products], len(mono_basis))
            rest = _reduce(_vector(part, mono_basis), span_rows, span_pivots)
            residual = max(abs(c) for c in rest)
            raise ExtensionError(f"degree-{degree} part of {f} is not reached by the generators", residual)
        for row, piv in zip(echelon, pivots):
            coef = row[-1]
            if coef:
                exps = products[piv][0]
                term = MultiPoly.constant(coef, basis.variables)
                for g, k in zip(basis.generators, exps):
                    if k:
                        term = term * g**k
                F = F + term
    if restrict_poly(F, ps) != f:
        raise ExtensionError(f"extension of {f} does not restrict back", None)
    return F


def intertwining_residual(ps: PolarStructure, basis: InvariantBasis, weyl: Optional[WeylGroup] = None) -> Fraction:
    """max coefficient of reynolds_Π(p|Σ) − p|Σ over the generators."""
    weyl = weyl or section_weyl(ps)
    worst = Fraction(0)
    for g in basis.generators:
        r = restrict_poly(g, ps)
        diff = reynolds_finite(r, weyl) - r
        worst = max([worst] + [abs(c) for c in diff.terms.values()])
    return worst


# --- Poisson restriction -----------------------------------------------------


def _exact_inverse(rows: tuple[tuple[Fraction, ...], ...]) -> list[list[Fraction]]:
    n = len(rows)
    inv = _to_qq([list(r) for r in rows], n).inv()
    return _from_matrix(inv.to_Matrix(), n)


def _momentum_variables(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n)) + tuple(f"xi{i + 1}" for i in range(n))


def cotangent_poly(ps: PolarStructure, p: MultiPoly) -> MultiPoly:
    """F(x, ξ) = p(x, G⁻¹ξ) for p on 𝔭², in variables (x1..xn, xi1..xin)."""
    lin = _require_linear(ps)
    n = lin.dim
    if len(p.variables) != 2 * n:
        raise VariableMismatchError(p.variables, copy_variables(n, 2))
    new_vars = _momentum_variables(n)
    ginv = _exact_inverse(lin.gram)
    images = [MultiPoly.variable(new_vars[i], new_vars) for i in range(n)]
    for i in range(n):
        images.append(MultiPoly.linear([Fraction(0)] * n + ginv[i], new_vars))
    return p.compose(images)


def restrict_cotangent_poly(ps: PolarStructure, F: MultiPoly) -> MultiPoly:
    """F ∘ (T*Σ ↪ T*M) in canonical coordinates (a1..ak, eta1..etak)."""
    lin = _require_linear(ps)
    n, k = lin.dim, lin.section_dim
    targets = tuple(f"a{j + 1}" for j in range(k)) + tuple(f"eta{j + 1}" for j in range(k))
    P = [list(r) for r in lin.section_matrix]
    G = [list(r) for r in lin.gram]
    # ξ = G P (Pᵀ G P)⁻¹ η
    GP = [[sum(G[i][l] * P[l][j] for l in range(n)) for j in range(k)] for i in range(n)]
    g_sigma = tuple(tuple(sum(P[l][i] * GP[l][j] for l in range(n)) for j in range(k)) for i in range(k))
    g_sigma_inv = _exact_inverse(g_sigma)
    lower = [[sum(GP[i][l] * g_sigma_inv[l][j] for l in range(k)) for j in range(k)] for i in range(n)]
    images = [MultiPoly.linear(P[i] + [Fraction(0)] * k, targets) for i in range(n)]
    images += [MultiPoly.linear([Fraction(0)] * k + lower[i], targets) for i in range(n)]
    return F.compose(images)


def exact_poisson_residual(ps: PolarStructure, p1: MultiPoly, p2: MultiPoly) -> Fraction:
    """max |coef| of {F₁,F₂}|T*Σ − {F₁|, F₂|}_{T*Σ}, for F_i built from p_i on 𝔭²."""
    lin = _require_linear(ps)
    n, k = lin.dim, lin.section_dim
    names = _momentum_variables(n)
    F1, F2 = cotangent_poly(ps, p1), cotangent_poly(ps, p2)
    ambient = poly_poisson_bracket(F1, F2, names[:n], names[n:])
    left = restrict_cotangent_poly(ps, ambient)
    r1, r2 = restrict_cotangent_poly(ps, F1), restrict_cotangent_poly(ps, F2)
    right = poly_poisson_bracket(r1, r2, r1.variables[:k], r1.variables[k:])
    return max((abs(c) for c in (left - right).terms.values()), default=Fraction(0))


def cotangent_observables(ps: PolarStructure, basis: Optional[InvariantBasis] = None) -> tuple[ObservableFn, ...]:
    """G-invariant observables on T*M: the example's own, or its m=2 generators."""
    if ps.invariants:
        return ps.invariants
    basis = basis or builtin_basis(ps, 2)
    return tuple(ObservableFn.from_poly(cotangent_poly(ps, g), name) for name, g in zip(basis.names, basis.generators))


def _require_invariant(ps: PolarStructure, F: ObservableFn, rng: np.random.Generator) -> None:
    bp = random_cotangent_point(ps.action, rng, ps.sample_point)
    residual = invariance_residual(ps.action, F, bp, rng, elements=10)
    scale = max(1.0, abs(float(primal(F(bp)))))
    if residual > 1e-8 * scale:
        raise PreconditionError(f"observable {F.name} is not G-invariant (residual {residual:.3e})")


def check_poisson_restriction(
    ps: PolarStructure,
    pairs: Sequence[tuple[ObservableFn, ObservableFn]],
    samples: int,
    rng: np.random.Generator,
) -> CheckResult:
    """|{F₁,F₂}_{T*M} − {F₁|,F₂|}_{T*Σ}| at sampled points of T*Σ̊."""
    seen: set[int] = set()
    for F1, F2 in pairs:
        for F in (F1, F2):
            if id(F) not in seen:
                _require_invariant(ps, F, rng)
                seen.add(id(F))
    sm = section_model(ps)
    result = CheckResult("poisson-restriction")
    for index in range(samples):
        bp = sample_section_covector(ps, rng)
        s, eta = section_covector_coordinates(ps, bp)
        sp = BundlePoint(s, eta, BundleKind.COTANGENT)
        for F1, F2 in pairs:
            ambient = poisson_bracket(ps.manifold, F1, F2, bp)
            restricted = poisson_bracket(sm, restrict_observable(ps, F1), restrict_observable(ps, F2), sp)
            result.record(abs(ambient - restricted), sample=index, pair=[F1.name, F2.name], point=bp.coordinates())
    return result


def check_exact_poisson(ps: PolarStructure, basis: InvariantBasis) -> CheckResult:
    result = CheckResult("poisson-restriction-exact")
    for i, p1 in enumerate(basis.generators):
        for j, p2 in enumerate(basis.generators):
            if i < j:
                result.record(float(exact_poisson_residual(ps, p1, p2)), pair=[basis.names[i], basis.names[j]])
    return result


# --- reduced algebras ---------------------------------------------------------


def _pi_orbit_distance(ps: PolarStructure, p: BundlePoint, q: BundlePoint) -> float:
    return min(bundle_distance(ps.manifold, ps.action.lift(w, p), q) for w in ps.weyl_elements)


def _as_cotangent(bp: BundlePoint) -> BundlePoint:
    return BundlePoint(primal(bp.base), primal(bp.fiber), BundleKind.COTANGENT)


def _pair_coordinates(ps: PolarStructure, bp: BundlePoint) -> np.ndarray:
    """(x, ξ^♯) as a point of 𝔭²."""
    x = primal(bp.base)
    return np.concatenate([x, primal(sharp(ps.manifold, x, primal(bp.fiber)))])


def _section_pair_coordinates(ps: PolarStructure, bp: BundlePoint) -> np.ndarray:
    lin = _require_linear(ps)
    P = lin.section_array()
    z = _pair_coordinates(ps, bp)
    n = lin.dim
    a = np.linalg.lstsq(P, z[:n], rcond=None)[0]
    b = np.linalg.lstsq(P, z[n:], rcond=None)[0]
    return np.concatenate([a, b])


def vanishing_ideal_residual(ps: PolarStructure, basis: InvariantBasis, samples: int, rng: np.random.Generator) -> tuple[float, int, list[str]]:
    """Invariant polynomials vanishing on u⁻¹(0) must restrict to zero on T*Σ.

    Returns (residual, number of vanishing combinations found, generators
    whose restriction is exactly zero).
    """
    count = max(samples, IDEAL_MIN_SAMPLES)
    zero_level = [_pair_coordinates(ps, bp) for bp in sample_zero_level(ps.action, rng, count, ps.sample_point)]
    section_points = [_section_pair_coordinates(ps, sample_section_covector(ps, rng)) for _ in range(max(20, samples // 10))]
    worst = 0.0
    found = 0
    for degree in range(1, basis.degree_bound + 1):
        products = _graded_products(list(basis.generators), basis.variables, degree)
        if not products:
            continue
        E = np.array([[float(p.eval(list(z))) for _, p in products] for z in zero_level])
        K = null_space(E, rtol=1e-10)
        if K.shape[1] == 0:
            continue
        found += K.shape[1]
        restricted = [restrict_poly(p, ps) for _, p in products]
        R = np.array([[float(r.eval(list(z))) for r in restricted] for z in section_points])
        scale = max(1.0, float(np.max(np.abs(R))))
        worst = max(worst, float(np.max(np.abs(R @ K))) / scale)
    exact_zero = [name for name, g in zip(basis.names, basis.generators) if restrict_poly(g, ps).is_zero()]
    return worst, found, exact_zero


def reduced_algebra_compare(
    ps: PolarStructure,
    basis: Optional[InvariantBasis],
    samples: int,
    rng: np.random.Generator,
) -> CheckResult:
    """Compare T*M⫽G and T*Σ⫽Π through invariant functions and orbit maps."""
    observables = cotangent_observables(ps, basis)
    separation = CheckResult("separation")
    for index in range(samples):
        p = sample_section_covector(ps, rng)
        if index % 2:
            w = ps.weyl_elements[index % len(ps.weyl_elements)]
            moved = _as_cotangent(ps.action.lift(w, p))
            q = BundlePoint(moved.base, moved.fiber * 1.01, BundleKind.COTANGENT)
        else:
            q = sample_section_covector(ps, rng)
        if _pi_orbit_distance(ps, p, q) <= SEPARATION_GAP:
            continue
        gap = max(abs(float(primal(F(p))) - float(primal(F(q)))) for F in observables)
        separation.record(0.0 if gap > SEPARATION_MIN else 1.0, sample=index, p=p.coordinates(), q=q.coordinates(), gap=gap)

    ideal = CheckResult("ideal")
    if ps.linear is not None and basis is not None:
        residual, found, exact_zero = vanishing_ideal_residual(ps, basis, min(samples, 500), rng)
        ideal.record(residual, vanishing_combinations=found)
        ideal.extra.update({"vanishing_combinations": found, "exact_zero_restrictions": exact_zero})

    orbit_map = CheckResult("orbit-map")
    for index, p in enumerate(sample_zero_level(ps.action, rng, min(samples, 200), ps.sample_point)):
        g = haar_sample(ps.action.group, rng)
        _, q1 = project_covector(ps, p)
        _, q2 = project_covector(ps, _as_cotangent(ps.action.lift(g, p)))
        orbit_map.record(_pi_orbit_distance(ps, q1, q2), sample=index, point=p.coordinates(), g=g.matrix)

    result = CheckResult("reduced-algebra")
    result.merge(separation, "separation_")
    result.merge(ideal, "ideal_")
    result.merge(orbit_map, "orbit_map_")
    return result


def symmetrized_monomials(ps: PolarStructure, m: int, degree: int, weyl: Optional[WeylGroup] = None) -> list[MultiPoly]:
    """Non-zero Reynolds images of the degree-d monomials on Σ^m."""
    lin = _require_linear(ps)
    weyl = weyl or section_weyl(ps)
    svars = section_variables(lin.section_dim, m)
    out = []
    for e in exponents_of_degree(len(svars), degree):
        r = reynolds_finite(monomial(e, svars), weyl)
        if not r.is_zero():
            out.append(r)
    return out
