"""Named verification suites run by the ``verify`` command.

Each suite takes a CheckContext and returns a CheckResult. Suites that do
not apply to an example (for instance polynomial certificates on a curved
manifold) return a result marked ``degraded`` instead of raising.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from polarsym.config import Settings
from polarsym.errors import ConfigError, ExtensionError
from polarsym.geometry import killing_residual, round_sphere
from polarsym.hamilton import ObservableFn, check_moment_identities, sample_zero_level
from polarsym.invariants import (
    InvariantBasis,
    builtin_basis,
    certify_surjectivity,
    check_exact_poisson,
    check_poisson_restriction,
    cotangent_observables,
    extend_invariant,
    intertwining_residual,
    reduced_algebra_compare,
    section_weyl,
    symmetrized_monomials,
)
from polarsym.liegroups import generator_field
from polarsym.numcore import primal
from polarsym.polar import (
    PolarStructure,
    bundle_distance,
    check_slice_diagram,
    check_slice_polarity,
    compute_weyl_group,
    cotangent_section_residual,
    embed_section_covector,
    principal_splitting,
    project_covector,
    sample_section_covector,
    symplectic_slice,
    verify_section,
    weyl_orbit_intersection,
)
from polarsym.sasaki import (
    IDENTITY_SLOTS,
    BundleKind,
    BundlePoint,
    SlotCalibration,
    calibrate_curvature_slots,
    check_TSigma_totally_geodesic,
)
from polarsym.utils import CheckResult, make_rng

logger = logging.getLogger(__name__)

GEOMETRY_SAMPLES = 50
INTERSECTION_BASES = 2
INTERSECTION_TRANSLATES = 500
POISSON_SAMPLES_CURVED = 100
POISSON_SAMPLES_FLAT = 25
CERTIFICATE_DEGREE = 4


@dataclass(frozen=True)
class CheckContext:
    ps: PolarStructure
    settings: Settings
    samples: int
    seed: int
    # curvature slot order adopted by calibration
    slots: Sequence[int] = IDENTITY_SLOTS

    def rng(self, label: str) -> np.random.Generator:
        return make_rng(self.seed, f"{self.ps.name}:{label}")


def degraded(name: str, reason: str) -> CheckResult:
    result = CheckResult(name)
    result.extra["degraded"] = reason
    return result


def _basis(ps: PolarStructure, m: int) -> Optional[InvariantBasis]:
    if ps.linear is None or ps.linear.generator_file(m) is None:
        return None
    return builtin_basis(ps, m)


def run_moment_identities(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    rng = ctx.rng("moment-identities")
    result = check_moment_identities(ps.action, ctx.samples, rng, ps.sample_point)
    killing = 0.0
    n = ps.manifold.dim
    for _ in range(min(ctx.samples, GEOMETRY_SAMPLES)):
        x = ps.sample_point(rng)
        for a in range(ps.action.group.group_dim):
            X = ps.action.group.basis_element(a)
            killing = max(
                killing,
                abs(killing_residual(ps.manifold, x, lambda y, X=X: generator_field(ps.action, X, y), rng.normal(size=n), rng.normal(size=n))),
            )
    result.extra["killing_max_residual"] = killing
    return result


def run_section_orthogonality(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    result = verify_section(ps, ctx.samples, ctx.rng("section-orthogonality"))
    weyl = compute_weyl_group(ps, ctx.rng("weyl-group"))
    result.extra["weyl_order"] = weyl.order
    polarity = check_slice_polarity(ps, min(ctx.samples, GEOMETRY_SAMPLES), ctx.rng("slice-polarity"))
    result.merge(polarity, "slice_polarity_")
    return result


def run_project_covector(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    rng = ctx.rng("project-covector")
    result = CheckResult("project-covector")
    for index, bp in enumerate(sample_zero_level(ps.action, rng, ctx.samples, ps.sample_point)):
        h, landed = project_covector(ps, bp, ctx.settings.fallback_iterations)
        consistency = bundle_distance(ps.manifold, ps.action.lift(h, bp), landed)
        result.record(
            cotangent_section_residual(ps, landed) + consistency,
            sample=index,
            point=bp.coordinates(),
            h=h.matrix,
        )
    return result


def run_totally_geodesic(ctx: CheckContext) -> CheckResult:
    samples = min(ctx.samples, GEOMETRY_SAMPLES)
    return check_TSigma_totally_geodesic(
        ctx.ps,
        samples,
        ctx.rng("totally-geodesic-tsigma"),
        max_step=ctx.settings.geodesic_max_step,
        slots=ctx.slots,
    )


def run_symplectic_slice(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    rng = ctx.rng("symplectic-slice")
    spans = CheckResult("spans")
    dims: dict[str, int] = {}
    points = [sample_section_covector(ps, rng) for _ in range(min(ctx.samples, GEOMETRY_SAMPLES))]
    for s in ps.singular_section_params:
        bp = embed_section_covector(ps, np.asarray(s, dtype=float), rng.normal(size=ps.section.dim))
        points.append(BundlePoint(primal(bp.base), primal(bp.fiber), BundleKind.COTANGENT))
    for index, bp in enumerate(points):
        sl = symplectic_slice(ps, bp)
        spans.record(max(sl.residuals.values(), default=0.0), sample=index, point=bp.coordinates(), dims=sl.dims)
        dims = sl.dims if index == 0 else dims
    diagram = CheckResult("diagram")
    coverage = {"identity_component_samples": 0, "finite_components_tested": 0}
    for index, bp in enumerate(points[:: max(1, len(points) // 5)]):
        part = check_slice_diagram(ps, bp, rng)
        coverage["identity_component_samples"] += part.extra["identity_component_samples"]
        coverage["finite_components_tested"] += part.extra["finite_components_tested"]
        diagram.merge(part)
    result = CheckResult("symplectic-slice")
    result.merge(spans, "spans_")
    result.merge(diagram, "diagram_")
    result.extra.update({"first_point_dims": dims, **coverage})
    return result


def run_principal_splitting(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    rng = ctx.rng("principal-splitting")
    result = CheckResult("principal-splitting")
    for _ in range(min(ctx.samples, GEOMETRY_SAMPLES)):
        part = principal_splitting(ps, sample_section_covector(ps, rng))
        result.merge(part)
    return result


def run_weyl_intersection(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    rng = ctx.rng("weyl-intersection")
    result = CheckResult("weyl-intersection")
    counts = []
    for _ in range(INTERSECTION_BASES):
        bp = sample_section_covector(ps, rng)
        part = weyl_orbit_intersection(ps, bp, rng, INTERSECTION_TRANSLATES)
        counts.append(part.extra["intersection_points"])
        result.merge(part)
    result.extra["intersection_points"] = counts
    result.extra["weyl_order"] = len(ps.weyl_elements)
    return result


def run_surjectivity(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    if ps.linear is None:
        return degraded("surjectivity-certificate", f"{ps.name} is not a linear representation; polynomial certificates do not apply")
    result = CheckResult("surjectivity-certificate")
    weyl = section_weyl(ps)
    certificates = []
    for m in (1, 2):
        basis = _basis(ps, m)
        if basis is None:
            continue
        top = min(CERTIFICATE_DEGREE, basis.degree_bound)
        for degree in range(top + 1):
            cert = certify_surjectivity(ps, m, basis, degree, weyl)
            certificates.append({"m": m, **cert.as_dict()})
            result.record(float(cert.max_residual), m=m, degree=degree)
        result.record(float(intertwining_residual(ps, basis, weyl)), m=m, part="intertwining")
        if m == 2:
            extended = 0
            for degree in range(top + 1):
                for f in symmetrized_monomials(ps, m, degree, weyl):
                    try:
                        extend_invariant(ps, m, f, basis)
                        extended += 1
                    except ExtensionError as exc:
                        residual = float(exc.residual) if exc.residual is not None else float("inf")
                        result.record(residual, m=m, degree=degree, target=str(f))
            result.extra["extended_invariants"] = extended
    if not certificates:
        return degraded("surjectivity-certificate", f"no generator list ships for {ps.name}")
    result.extra["certificates"] = certificates
    if any(not c["passed"] for c in certificates):
        result.extra["note"] = "a failing certificate may mean an incomplete generator list rather than a false statement"
    return result


def run_poisson_restriction(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    rng = ctx.rng("poisson-restriction")
    basis = _basis(ps, 2)
    if not ps.invariants and basis is None:
        return degraded("poisson-restriction", f"no invariant observables available for {ps.name}")
    observables = list(cotangent_observables(ps, basis))
    pairs = [(a, b) for i, a in enumerate(observables) for b in observables[i + 1 :]]
    pairs.append((observables[0], ObservableFn.constant(1.0)))
    budget = POISSON_SAMPLES_CURVED if ps.linear is None else POISSON_SAMPLES_FLAT
    result = CheckResult("poisson-restriction")
    result.merge(check_poisson_restriction(ps, pairs, min(ctx.samples, budget), rng), "numeric_")
    if basis is not None:
        result.merge(check_exact_poisson(ps, basis), "exact_")
    return result


def run_reduced_algebra(ctx: CheckContext) -> CheckResult:
    ps = ctx.ps
    return reduced_algebra_compare(ps, _basis(ps, 2), ctx.samples, ctx.rng("reduced-algebra"))


SUITES: dict[str, Callable[[CheckContext], CheckResult]] = {
    "moment-identities": run_moment_identities,
    "section-orthogonality": run_section_orthogonality,
    "project-covector": run_project_covector,
    "totally-geodesic-tsigma": run_totally_geodesic,
    "symplectic-slice": run_symplectic_slice,
    "principal-splitting": run_principal_splitting,
    "weyl-intersection": run_weyl_intersection,
    "surjectivity-certificate": run_surjectivity,
    "poisson-restriction": run_poisson_restriction,
    "reduced-algebra": run_reduced_algebra,
}


def resolve_checks(names: list[str]) -> list[str]:
    """Expand ``all`` and reject unknown names, keeping the given order."""
    out: list[str] = []
    for name in names:
        if name == "all":
            out.extend(n for n in SUITES if n not in out)
        elif name in SUITES:
            if name not in out:
                out.append(name)
        else:
            raise ConfigError(f"unknown check {name!r}; known: all, {', '.join(SUITES)}")
    return out


def run_calibration(settings: Settings, seed: int) -> SlotCalibration:
    return calibrate_curvature_slots(
        round_sphere(settings.chart_band),
        make_rng(seed, "curvature-calibration"),
        samples=settings.calibration_samples,
        tol=settings.calibration_tol,
    )
