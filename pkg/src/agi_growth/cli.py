"""Command line entry point: ``agi-growth run|project|synth|selfcheck``.

Exit codes: 0 success, 1 input or config error, 2 numerical failure,
3 self-check failure.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click

from agi_growth import pipeline
from agi_growth.errors import ConvergenceError, DataError, DomainError
from agi_growth.ingest import Orientation, ReportFormat, load_config_file

EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_SELFCHECK = 3

logger = logging.getLogger("agi_growth")


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DataError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except (DomainError, ConvergenceError, ArithmeticError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)

    return wrapper


def _emit(text: str, path: str | None) -> None:
    if path is None:
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text, encoding="utf-8")
        logger.info("wrote %s", path)


@click.group()
@click.option("--quiet", is_flag=True, help="Only print results and errors.")
def main(quiet: bool) -> None:
    """AGI technology index and its log-log regression on real GDP."""
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--output", "fmt", type=click.Choice([f.value for f in ReportFormat]), default=None,
              help="Report format; overrides the config.")
@click.option("--out", "out_path", default=None, help="Write the report here instead of the config's path.")
@_handle_errors
def run_cmd(config_path: str, fmt: str | None, out_path: str | None) -> None:
    """Compute the index and regression for a JSON run config."""
    config = load_config_file(config_path)
    report = pipeline.run(config)
    report_format = ReportFormat(fmt) if fmt else config.output.format
    target = out_path or (str(config.resolve(config.output.path)) if config.output.path else None)
    _emit(pipeline.render(report, report_format), target)


@main.command("project")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--agi-growth", type=float, required=True, help="Annual AGI growth in percent.")
@click.option("--years", type=click.IntRange(min=1), required=True)
@click.option("--output", "fmt", type=click.Choice([f.value for f in ReportFormat]), default="json")
@_handle_errors
def project_cmd(config_path: str, agi_growth: float, years: int, fmt: str) -> None:
    """Extrapolate GDP growth from a constant AGI growth rate."""
    config = load_config_file(config_path)
    report = pipeline.run(config, orientations=(Orientation.GDP_ON_AGI,))
    rows = pipeline.project(report, agi_growth, years)
    slope = report.regression[Orientation.GDP_ON_AGI].fit.slope
    if fmt == "json":
        doc = {
            "elasticity": slope,
            "agi_growth_pct": agi_growth,
            "note": "in-sample log-log elasticity extrapolation, not a forecast",
            "projection": [{"year": yr, "gdp_growth_pct": g} for yr, g in rows],
        }
        click.echo(json.dumps(doc, indent=2))
    else:
        click.echo("year,gdp_growth_pct")
        for yr, g in rows:
            click.echo(f"{yr},{g!r}")


@main.command("synth")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--first-year", type=int, default=1990, show_default=True)
@click.option("--years", "n_years", type=click.IntRange(min=3), default=30, show_default=True)
@click.option("--alpha", type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.33, show_default=True)
@click.option("--seed", type=int, default=2024, show_default=True)
@_handle_errors
def synth_cmd(out_dir: str, first_year: int, n_years: int, alpha: float, seed: int) -> None:
    """Write a synthetic panel as four FRED-style CSV files plus config.json."""
    ds = pipeline.synthesize_dataset(first_year, n_years, alpha, seed)
    config_path = pipeline.write_synthetic_dataset(out_dir, ds)
    click.echo(str(config_path))


@main.command("selfcheck")
def selfcheck_cmd() -> None:
    """Run the built-in numerical and parsing checks."""
    summary = pipeline.selfcheck()
    for line in summary.lines():
        click.echo(line)
    if not summary.passed:
        sys.exit(EXIT_SELFCHECK)


if __name__ == "__main__":
    main()
