"""``verify``: run named verification suites over the example zoo.

CLI examples:
  verify --example so2-r2 --check all --samples 200 --seed 42
  verify --example s1-s2 --check totally-geodesic-tsigma --seed 7 --out report.json
  verify --example so3-sym0 --check surjectivity-certificate --format md

Exit codes: 0 when every check passes (degraded checks included), 1 when
any check fails or the curvature slot calibration is not unique, 2 on
configuration errors. Environment variables are not
read; the invocation is the whole configuration.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import List, Optional

import typer
from rich import box, print
from rich.table import Table

from polarsym import __version__
from polarsym.checks import SUITES, CheckContext, run_calibration
from polarsym.config import Settings, parse_tolerance_overrides
from polarsym.errors import ConfigError, PolarSymError
from polarsym.sasaki import IDENTITY_SLOTS
from polarsym.schema import Calibration, CheckReport, RunConfig, RunReport
from polarsym.utils import CheckResult
from polarsym.zoo import get_example

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"
STATUS_STYLE = {"pass": "green", "fail": "red", "degraded": "yellow"}


def execute(config: RunConfig, settings: Optional[Settings] = None) -> RunReport:
    """Run every configured check in config order and collect the reports."""
    settings = (settings or Settings()).with_overrides(config.tolerances)
    settings.validate()
    ps = get_example(config.example, settings)
    calibration = run_calibration(settings, config.seed)
    if not calibration.unique:
        logger.warning("curvature slot calibration is not unique (choice %s); the run will fail", calibration.choice)
    ctx = CheckContext(
        ps=ps,
        settings=settings,
        samples=config.samples,
        seed=config.seed,
        slots=calibration.choice or IDENTITY_SLOTS,
    )
    reports = []
    for name in config.checks:
        logger.info("running %s on %s", name, ps.name)
        started = time.perf_counter()
        error = None
        try:
            result = SUITES[name](ctx)
        except ConfigError:
            raise
        except PolarSymError as exc:
            logger.warning("%s raised %s: %s", name, type(exc).__name__, exc)
            result = CheckResult(name, max_residual=float("inf"))
            error = f"{type(exc).__name__}: {exc}"
        result.name = name
        elapsed = time.perf_counter() - started
        report = CheckReport.from_result(
            result,
            config,
            settings.tolerance(name),
            error=error,
            wall_time=round(elapsed, 3) if config.timings else None,
        )
        logger.info("%s: %s (max residual %.3e)", name, report.status, report.max_residual)
        reports.append(report)
    return RunReport(
        config=config,
        library_version=__version__,
        calibration=Calibration.from_slots(calibration),
        reports=reports,
    )


def summary_table(report: RunReport) -> Table:
    table = Table(title=f"verify {report.config.example} (seed {report.config.seed})", box=box.MINIMAL_DOUBLE_HEAD)
    table.add_column("Check")
    table.add_column("Status")
    table.add_column("Max residual", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Samples", justify="right")
    for r in report.reports:
        style = STATUS_STYLE[r.status]
        table.add_row(r.check, f"[{style}]{r.status}[/{style}]", f"{r.max_residual:.3e}", f"{r.tolerance:.1e}", str(r.sample_count))
    return table


def main(
    example: str = typer.Option(..., help="Example name: so2-r2, so3-adj, so3-sym0, torus-c<n>, s1-s2"),
    check: List[str] = typer.Option(["all"], help="Check to run (repeatable); 'all' runs the full suite"),
    samples: Optional[int] = typer.Option(None, help="Samples per check. Default from Settings (200)"),
    seed: Optional[int] = typer.Option(None, help="Master seed. Default from Settings (42)"),
    tol: List[str] = typer.Option([], help="Tolerance override KEY=VAL (repeatable)"),
    out: Optional[Path] = typer.Option(None, help="Write the report here instead of stdout"),
    format: str = typer.Option("json", "--format", help="Report format: json or md"),
    timings: bool = typer.Option(False, help="Include wall times (reports are then no longer byte-stable)"),
    verbose: bool = typer.Option(False, help="DEBUG logging"),
) -> None:
    """Verify the symplectic structure of a polar example."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT, force=True)
    cfg = Settings()
    try:
        cfg.validate()
        overrides = parse_tolerance_overrides(tol)
        tolerances = cfg.with_overrides(overrides).tolerances
        config = RunConfig.build(
            example=example,
            checks=check,
            samples=samples if samples is not None else cfg.samples,
            seed=seed if seed is not None else cfg.seed,
            tolerances=tolerances,
            out=str(out) if out else None,
            format=format,
            timings=timings,
        )
    except (ConfigError, ValueError) as exc:
        print(f"[red]configuration error:[/red] {exc}")
        raise typer.Exit(code=2)

    print(
        f"[bold]verify[/bold] | example=[cyan]{config.example}[/cyan] | checks={len(config.checks)} | samples={config.samples} | seed={config.seed}"
    )
    try:
        report = execute(config, cfg)
    except ConfigError as exc:
        print(f"[red]configuration error:[/red] {exc}")
        raise typer.Exit(code=2)

    print(summary_table(report))
    text = report.render()
    if out is not None:
        out.write_text(text, encoding="utf-8")
        print(f"report written to [cyan]{out}[/cyan]")
    else:
        typer.echo(text, nl=False)

    if report.failed:
        print(f"[red]{len(report.failed)} check(s) failed.[/red] Each failing report carries a reproduction entry.")
    if not report.calibration.unique:
        print("[red]curvature slot calibration did not single out one ordering.[/red]")
    raise typer.Exit(code=report.exit_code)


def run() -> None:
    typer.run(main)


if __name__ == "__main__":
    run()
