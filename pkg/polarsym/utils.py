from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from polarsym.numcore import DualScalar, primal


def derive_seed(seed: int, label: str) -> int:
    """Stable 64-bit seed for a named sub-stream of a master seed."""
    digest = hashlib.sha1(f"{seed}:{label}".encode("utf-8")).hexdigest()[:16]
    return int(digest, 16)


def make_rng(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, label))


def to_jsonable(value: Any) -> Any:
    """Convert numpy, dual and rational values into plain JSON types."""
    if isinstance(value, DualScalar):
        return float(primal(value))
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in primal(value).tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, float):
        return round(value, 15) if np.isfinite(value) else str(value)
    return value


@dataclass
class CheckResult:
    """Running maximum of a residual over samples, with the worst input kept."""

    name: str
    max_residual: float = 0.0
    sample_count: int = 0
    worst_case: dict[str, Any] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)

    def record(self, residual: float, **case: Any) -> None:
        residual = float(residual)
        if not math.isfinite(residual):
            residual = math.inf
        self.sample_count += 1
        if residual > self.max_residual or not self.worst_case:
            self.max_residual = max(self.max_residual, residual)
            self.worst_case = {k: to_jsonable(v) for k, v in case.items()}

    def merge(self, other: "CheckResult", prefix: str = "") -> None:
        if other.max_residual >= self.max_residual and other.sample_count:
            self.worst_case = {"part": prefix or other.name, **other.worst_case}
        self.max_residual = max(self.max_residual, other.max_residual)
        self.sample_count += other.sample_count
        for k, v in other.extra.items():
            self.extra[f"{prefix}{k}" if prefix else k] = v
        if prefix:
            self.extra[f"{prefix}max_residual"] = other.max_residual

    def passed(self, tolerance: float) -> bool:
        return self.max_residual < tolerance
