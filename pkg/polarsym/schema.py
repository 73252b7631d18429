from __future__ import annotations

import json
import math
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from polarsym.checks import resolve_checks
from polarsym.config import CHECK_NAMES
from polarsym.errors import ConfigError
from polarsym.sasaki import SlotCalibration
from polarsym.utils import CheckResult, to_jsonable
from polarsym.zoo import EXAMPLE_NAMES, is_known_example

Status = Literal["pass", "fail", "degraded"]


class RunConfig(BaseModel):
    """Everything that determines the bytes of a report."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    example: str
    checks: list[str] = Field(default_factory=lambda: ["all"])
    samples: int = Field(default=200, gt=0)
    seed: int = Field(default=42, ge=0, lt=2**64)
    tolerances: dict[str, float] = Field(default_factory=dict)
    out: Optional[str] = Field(default=None, exclude=True)
    format: Literal["json", "md"] = "json"
    timings: bool = False

    @field_validator("example")
    @classmethod
    def _known_example(cls, value: str) -> str:
        if not is_known_example(value):
            raise ValueError(f"unknown example {value!r}; known: {', '.join(EXAMPLE_NAMES)} (torus-c<n> for any n >= 1)")
        return value

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, value: list[str]) -> list[str]:
        if not value:
            raise ValueError("at least one check is required")
        return resolve_checks(value)

    @field_validator("tolerances")
    @classmethod
    def _known_tolerances(cls, value: dict[str, float]) -> dict[str, float]:
        unknown = sorted(set(value) - set(CHECK_NAMES))
        if unknown:
            raise ValueError(f"unknown tolerance key(s): {', '.join(unknown)}")
        for key, tol in value.items():
            if not (tol > 0 and math.isfinite(tol)):
                raise ValueError(f"tolerance for {key} must be a positive number")
        return value

    @classmethod
    def build(cls, **fields: Any) -> "RunConfig":
        """Validate, turning pydantic errors into ConfigError."""
        try:
            return cls(**fields)
        except ValidationError as exc:
            messages = "; ".join(f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors())
            raise ConfigError(messages) from exc


class Reproduction(BaseModel):
    example: str
    check: str
    seed: int
    samples: int
    sample_index: Optional[int] = None


class CheckReport(BaseModel):
    check: str
    status: Status
    max_residual: float
    tolerance: float
    sample_count: int
    worst_case: dict[str, Any] = Field(default_factory=dict)
    reproduction: Optional[Reproduction] = None
    extra: dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None
    wall_time: Optional[float] = None

    @classmethod
    def from_result(
        cls,
        result: CheckResult,
        config: RunConfig,
        tolerance: float,
        error: Optional[str] = None,
        wall_time: Optional[float] = None,
    ) -> "CheckReport":
        if error is not None:
            status: Status = "fail"
        elif "degraded" in result.extra:
            status = "degraded"
        else:
            status = "pass" if result.passed(tolerance) else "fail"
        reproduction = None
        if status == "fail":
            index = result.worst_case.get("sample")
            reproduction = Reproduction(
                example=config.example,
                check=result.name,
                seed=config.seed,
                samples=config.samples,
                sample_index=index if isinstance(index, int) else None,
            )
        return cls(
            check=result.name,
            status=status,
            max_residual=result.max_residual,
            tolerance=tolerance,
            sample_count=result.sample_count,
            worst_case=to_jsonable(result.worst_case),
            reproduction=reproduction,
            extra=to_jsonable(result.extra),
            error=error,
            wall_time=wall_time,
        )


class Calibration(BaseModel):
    curvature_slot_choice: Optional[list[int]] = None
    unique: bool
    slot_residuals: dict[str, float]
    formula_residuals: dict[str, float]
    samples: int

    @classmethod
    def from_slots(cls, slots: SlotCalibration) -> "Calibration":
        return cls(**slots.as_dict())


class RunReport(BaseModel):
    config: RunConfig
    library_version: str
    calibration: Calibration
    reports: list[CheckReport]

    @property
    def failed(self) -> list[CheckReport]:
        return [r for r in self.reports if r.status == "fail"]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed or not self.calibration.unique else 0

    def payload(self) -> dict[str, Any]:
        data = self.model_dump(mode="python")
        if not self.config.timings:
            for report in data["reports"]:
                report.pop("wall_time", None)
        return to_jsonable(data)

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2) + "\n"

    def to_markdown(self) -> str:
        cfg = self.config
        lines = [
            f"# verify report: {cfg.example}",
            "",
            f"- library version: {self.library_version}",
            f"- seed: {cfg.seed}, samples: {cfg.samples}",
            f"- curvature slot choice: {self.calibration.curvature_slot_choice} (unique: {self.calibration.unique})",
            "",
            "| check | status | max residual | tolerance | samples |",
            "|---|---|---|---|---|",
        ]
        for r in self.reports:
            lines.append(f"| {r.check} | {r.status} | {r.max_residual:.3e} | {r.tolerance:.1e} | {r.sample_count} |")
        notes = [r for r in self.reports if r.status != "pass"]
        if notes:
            lines += ["", "## Details", ""]
            for r in notes:
                reason = r.error or r.extra.get("degraded") or json.dumps(r.worst_case, sort_keys=True)
                lines.append(f"- **{r.check}** ({r.status}): {reason}")
                if r.reproduction is not None:
                    rep = r.reproduction
                    lines.append(
                        f"  - reproduce: `verify --example {rep.example} --check {rep.check} --seed {rep.seed} --samples {rep.samples}` (sample {rep.sample_index})"
                    )
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        return self.to_markdown() if self.config.format == "md" else self.to_json()
