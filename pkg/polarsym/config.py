from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from polarsym.errors import ConfigError

CHECK_NAMES: tuple[str, ...] = (
    "moment-identities",
    "section-orthogonality",
    "project-covector",
    "totally-geodesic-tsigma",
    "symplectic-slice",
    "principal-splitting",
    "weyl-intersection",
    "surjectivity-certificate",
    "poisson-restriction",
    "reduced-algebra",
)


def default_tolerances() -> dict[str, float]:
    return {
        "moment-identities": 1e-8,
        "section-orthogonality": 1e-8,
        "project-covector": 1e-7,
        "totally-geodesic-tsigma": 1e-5,
        "symplectic-slice": 1e-7,
        "principal-splitting": 1e-8,
        "weyl-intersection": 1e-6,
        "surjectivity-certificate": 1e-12,
        "poisson-restriction": 1e-6,
        "reduced-algebra": 1e-6,
    }


@dataclass(frozen=True)
class Settings:
    tolerances: dict[str, float] = field(default_factory=default_tolerances)
    samples: int = 200
    seed: int = 42

    sample_margin: float = 1e-3
    chart_band: float = 1e-2
    geodesic_max_step: float = 1e-3
    calibration_samples: int = 50
    calibration_tol: float = 1e-4
    fallback_iterations: int = 10_000

    def validate(self) -> None:
        if self.samples <= 0:
            raise ValueError("samples must be positive.")
        if self.calibration_samples <= 0 or self.fallback_iterations <= 0:
            raise ValueError("calibration_samples and fallback_iterations must be positive.")
        for name in ("sample_margin", "chart_band", "geodesic_max_step", "calibration_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive.")
        for key, value in self.tolerances.items():
            if value <= 0:
                raise ValueError(f"tolerance for {key} must be positive.")

    def tolerance(self, check: str) -> float:
        return self.tolerances[check]

    def with_overrides(self, overrides: Mapping[str, float]) -> "Settings":
        unknown = sorted(set(overrides) - set(self.tolerances))
        if unknown:
            raise ConfigError(f"unknown tolerance key(s): {', '.join(unknown)}")
        merged = dict(self.tolerances)
        merged.update({k: float(v) for k, v in overrides.items()})
        return replace(self, tolerances=merged)


def parse_tolerance_overrides(items: list[str]) -> dict[str, float]:
    """Parse repeated ``KEY=VAL`` options into a mapping."""
    out: dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"tolerance override must look like KEY=VAL, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"tolerance value for {key!r} is not a number: {value!r}") from exc
    return out
