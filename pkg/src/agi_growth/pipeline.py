"""End-to-end run: ingest -> AGI index -> log-log regression -> report.

Also hosts the what-if projection, the synthetic dataset writer used for
demos and the bundled snapshot, and the self-check suites.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import random
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from agi_growth import __version__, inference, production
from agi_growth.errors import AgiGrowthError, DataError, DomainError
from agi_growth.inference import InferenceReport
from agi_growth.ingest import (
    Orientation,
    PipelineConfig,
    ReportFormat,
    assemble,
    parse_fred_csv,
    to_fred_csv,
)
from agi_growth.production import (
    DEFAULT_ALPHA,
    DEFAULT_ALPHA_PROVENANCE,
    ElasticityEstimate,
    IndexResult,
    ModelParams,
)
from agi_growth.timeseries import AlignedPanel, Frequency, log_transform, make_series

logger = logging.getLogger(__name__)

_VARIABLE_LABEL = {"gdp": "real GDP", "agi": "the AGI technology level"}
_ORIENTATION_VARS = {
    Orientation.GDP_ON_AGI: ("gdp", "agi"),  # (dependent, independent)
    Orientation.AGI_ON_GDP: ("agi", "gdp"),
}


@dataclass(frozen=True)
class RunReport:
    config_echo: dict[str, Any]
    panel_summary: tuple[int, int, int]
    alpha_used: float
    alpha_provenance: str
    index: IndexResult
    ln_gdp: tuple[float, ...]
    ln_agi: tuple[float, ...]
    regression: dict[Orientation, InferenceReport]
    interpretation: tuple[str, ...]
    elasticity: ElasticityEstimate | None = None
    engine_version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        """Report as an ordered mapping; key order is part of the output format."""
        n, first, last = self.panel_summary
        return {
            "engine_version": self.engine_version,
            "config": self.config_echo,
            "panel_summary": {"n": n, "first_year": first, "last_year": last},
            "alpha_used": {"value": self.alpha_used, "provenance": self.alpha_provenance},
            "elasticity": _elasticity_dict(self.elasticity),
            "index": {
                "years": list(self.index.years),
                "agi": list(self.index.agi),
                "tfp_residual": list(self.index.tfp_residual),
                "effective_labor": list(self.index.effective_labor),
                "params": {
                    "alpha": self.index.params.alpha,
                    "inversion_mode": self.index.params.inversion_mode.value,
                    "residual_mode": self.index.params.residual_mode.value,
                },
                "source_window": list(self.index.source_window),
            },
            "series": {
                "years": list(self.index.years),
                "ln_gdp": list(self.ln_gdp),
                "ln_agi": list(self.ln_agi),
            },
            "regression": {
                o.value: _inference_dict(o, rep) for o, rep in self.regression.items()
            },
            "interpretation": list(self.interpretation),
        }


def _elasticity_dict(est: ElasticityEstimate | None) -> dict[str, Any] | None:
    if est is None:
        return None
    return {
        "regression_estimate": est.regression_estimate,
        "pointwise": [{"year": yr, "ratio": r} for yr, r in est.pointwise],
        "method_note": est.method_note,
    }


def _inference_dict(orientation: Orientation, rep: InferenceReport) -> dict[str, Any]:
    dep, indep = _ORIENTATION_VARS[orientation]
    t = rep.t_statistic
    return {
        "dependent": f"ln_{dep}",
        "independent": f"ln_{indep}",
        "n": rep.fit.n,
        "slope": rep.fit.slope,
        "intercept": rep.fit.intercept,
        "standard_error": rep.standard_error,
        "pearson_r": rep.pearson_r,
        "r_squared": rep.r_squared,
        # JSON has no infinity; a perfect fit is flagged instead
        "t_statistic": t if math.isfinite(t) else None,
        "p_value": rep.p_value,
        "degrees_of_freedom": rep.degrees_of_freedom,
        "perfect_fit": rep.perfect_fit,
        "residuals": list(rep.fit.residuals),
    }


def interpret(orientation: Orientation, slope: float) -> tuple[str, str]:
    """Direct and reciprocal readings of a log-log slope."""
    dep, indep = (_VARIABLE_LABEL[v] for v in _ORIENTATION_VARS[orientation])
    direct = f"A 1% increase in {indep} is associated with a {slope:.6g}% change in {dep}."
    if slope == 0.0:
        reciprocal = f"A zero slope gives no finite change in {indep} that moves {dep} by 1%."
    else:
        reciprocal = (
            f"Moving {dep} by 1% corresponds to a {1.0 / slope:.6g}% change in {indep} "
            f"at the fitted elasticity."
        )
    return direct, reciprocal


@dataclass
class _Stage:
    name: str

    def __enter__(self) -> None:
        logger.debug("stage %s", self.name)

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc is not None and isinstance(exc, AgiGrowthError):
            raise type(exc)(f"stage {self.name}: {exc}") from exc
        return False


def resolve_alpha(config: PipelineConfig, panel: AlignedPanel) -> tuple[float, str, ElasticityEstimate | None]:
    if config.alpha == "estimate":
        est = production.elasticity_regression(panel)
        alpha = est.regression_estimate
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"estimated alpha {alpha!r} lies outside (0, 1)")
        return alpha, f"estimated: {est.method_note}", est
    if config.alpha == DEFAULT_ALPHA:
        return config.alpha, DEFAULT_ALPHA_PROVENANCE, None
    return float(config.alpha), "user-supplied in config", None


def run_panel(
    panel: AlignedPanel,
    config: PipelineConfig,
    orientations: tuple[Orientation, ...] | None = None,
) -> RunReport:
    """Everything after ingestion; split out so synthetic panels can be run directly."""
    if orientations is None:
        orientations = (config.regression_orientation,)
    with _Stage("alpha"):
        alpha, provenance, est = resolve_alpha(config, panel)
    with _Stage("index"):
        params = ModelParams(alpha, config.inversion_mode, config.residual_mode)
        index = production.compute_index(panel, params)
    with _Stage("regression"):
        ln_gdp = log_transform(panel.y)
        ln_agi = log_transform(index.agi)
        columns = {"gdp": ln_gdp, "agi": ln_agi}
        regression = {}
        interpretation: list[str] = []
        for o in orientations:
            dep, indep = _ORIENTATION_VARS[o]
            rep = inference.infer(columns[indep], columns[dep])
            regression[o] = rep
            interpretation.extend(interpret(o, rep.fit.slope))
    return RunReport(
        config_echo=config.to_dict(),
        panel_summary=(len(panel), panel.years[0], panel.years[-1]),
        alpha_used=alpha,
        alpha_provenance=provenance,
        index=index,
        ln_gdp=tuple(ln_gdp),
        ln_agi=tuple(ln_agi),
        regression=regression,
        interpretation=tuple(interpretation),
        elasticity=est,
    )


def run(config: PipelineConfig, orientations: tuple[Orientation, ...] | None = None) -> RunReport:
    """Assemble the configured sources and run the full analysis."""
    with _Stage("assemble"):
        panel = assemble(config)
    logger.info("panel: %d years, %d-%d", len(panel), panel.years[0], panel.years[-1])
    return run_panel(panel, config, orientations)


def project(report: RunReport, agi_growth_pct: float, years: int) -> list[tuple[int, float]]:
    """Extrapolate GDP growth from a constant AGI growth rate.

    Uses the in-sample log-log elasticity of GDP on AGI, so each projected
    year gets ``slope * agi_growth_pct`` percent GDP growth.
    """
    if years < 1:
        raise DataError(f"years must be a positive integer, got {years!r}")
    rep = report.regression.get(Orientation.GDP_ON_AGI)
    if rep is None or rep.perfect_fit or not math.isfinite(rep.fit.slope):
        raise DomainError("no usable elasticity: need a gdp_on_agi regression without a perfect fit")
    last = report.panel_summary[2]
    growth = rep.fit.slope * agi_growth_pct
    return [(last + i, growth) for i in range(1, years + 1)]


# ---------------------------------------------------------------------------
# Report serialization


def report_json(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n"


def _flatten(value: Any, prefix: str) -> Iterator[tuple[str, Any]]:
    if isinstance(value, dict):
        for k, v in value.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else k)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            yield from _flatten(v, f"{prefix}.{i}")
    else:
        yield prefix, value


def report_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in _flatten(report.to_dict(), ""):
        if value is None:
            value = ""
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        writer.writerow([key, value])
    return buf.getvalue()


def render(report: RunReport, fmt: ReportFormat) -> str:
    return report_json(report) if fmt is ReportFormat.JSON else report_csv(report)


# ---------------------------------------------------------------------------
# Synthetic data


@dataclass(frozen=True)
class SyntheticDataset:
    years: tuple[int, ...]
    gdp_quarterly: tuple[tuple[tuple[int, int], float], ...]
    capital: tuple[float, ...]
    labor: tuple[float, ...]
    tfp: tuple[float, ...]
    agi: tuple[float, ...]
    alpha: float


# within-year shape applied to annual output to make quarterly GDP
_QUARTER_SHAPE = (0.994, 0.998, 1.002, 1.006)


def synthesize_dataset(
    first_year: int = 1990,
    n_years: int = 30,
    alpha: float = DEFAULT_ALPHA,
    seed: int = 2024,
    agi_growth: float = 0.05,
    noise: float = 0.01,
) -> SyntheticDataset:
    """Deterministic synthetic macro inputs with a noisy exponential AGI path.

    Capital, labor and TFP follow noisy growth paths; output is generated by
    the production function and spread over quarters. Values are rounded to
    three decimals the way published series are.
    """
    rng = random.Random(seed)
    params = ModelParams(alpha)
    years = tuple(range(first_year, first_year + n_years))
    k, l, a, g = 15000.0, 120.0, 80.0, 1.0  # noqa: E741
    caps, labs, tfps, agis, quarters = [], [], [], [], []
    for year in years:
        caps.append(round(k, 3))
        labs.append(round(l, 3))
        tfps.append(round(a, 3))
        agis.append(g)
        y = production.output(tfps[-1], caps[-1], labs[-1], g, params)
        for q, s in enumerate(_QUARTER_SHAPE, start=1):
            quarters.append(((year, q), round(y * s, 3)))
        k *= 1.0 + rng.gauss(0.03, 0.01)
        l *= 1.0 + rng.gauss(0.01, 0.005)  # noqa: E741
        a *= 1.0 + rng.gauss(0.01, 0.01)
        g *= math.exp(agi_growth + rng.gauss(0.0, noise))
    return SyntheticDataset(years, tuple(quarters), tuple(caps), tuple(labs), tuple(tfps), tuple(agis), alpha)


SYNTH_FILES = {
    "gdp": ("gdp.csv", "SYNGDPQ", Frequency.QUARTERLY, "billions of chained dollars (synthetic)"),
    "capital": ("capital.csv", "SYNCAPA", Frequency.ANNUAL, "capital stock index (synthetic)"),
    "labor": ("labor.csv", "SYNLABA", Frequency.ANNUAL, "labor input index (synthetic)"),
    "tfp": ("tfp.csv", "SYNTFPA", Frequency.ANNUAL, "TFP index (synthetic)"),
}


def write_synthetic_dataset(out_dir: str | Path, ds: SyntheticDataset) -> Path:
    """Write four FRED-layout CSV files plus a matching ``config.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    annual = {"capital": ds.capital, "labor": ds.labor, "tfp": ds.tfp}
    sources = []
    for variable, (fname, series_id, freq, unit) in SYNTH_FILES.items():
        if variable == "gdp":
            series = make_series(series_id, unit, freq, ds.gdp_quarterly)
        else:
            series = make_series(series_id, unit, freq, zip(ds.years, annual[variable]))
        (out / fname).write_bytes(to_fred_csv(series))
        sources.append(
            {"path": fname, "format": "fred_csv", "variable": variable, "frequency": freq.value, "unit": unit}
        )
    config = {"sources": sources, "alpha": ds.alpha}
    config_path = out / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return config_path


def snapshot_dir() -> Path:
    return Path(__file__).parent / "data" / "snapshot"


def snapshot_config_path() -> Path:
    return snapshot_dir() / "config.json"


# ---------------------------------------------------------------------------
# Self-check


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


@dataclass
class SelfcheckSummary:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed_suites(self) -> list[str]:
        return sorted({r.suite for r in self.results if not r.passed})

    def lines(self) -> list[str]:
        out = [
            f"{'PASS' if r.passed else 'FAIL'} {r.suite}: {r.name} ({r.detail})" for r in self.results
        ]
        verdict = "all checks passed" if self.passed else "FAILED suites: " + ", ".join(self.failed_suites)
        out.append(f"{sum(r.passed for r in self.results)}/{len(self.results)} checks passed; {verdict}")
        return out


def _check(summary: SelfcheckSummary, suite: str, name: str, fn: Callable[[], tuple[bool, str]]) -> None:
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    summary.results.append(CheckResult(suite, name, ok, detail))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _production_checks(summary: SelfcheckSummary) -> None:
    rng = random.Random(12345)
    draws = []
    for _ in range(1000):
        a, k, l, g = (10 ** rng.uniform(-3, 3) for _ in range(4))  # noqa: E741
        draws.append((a, k, l, g, ModelParams(rng.uniform(0.05, 0.95))))

    def round_trip() -> tuple[bool, str]:
        err = max(
            _rel(production.agi_index(production.output(a, k, l, g, p), a, k, l, p), g)
            for a, k, l, g, p in draws
        )
        return err <= 1e-10, f"max rel err {err:.2e}"

    def residual() -> tuple[bool, str]:
        err = max(
            _rel(production.tfp_residual(production.output(a, k, l, g, p), k, l, g, p), a)
            for a, k, l, g, p in draws
        )
        return err <= 1e-10, f"max rel err {err:.2e}"

    def homogeneity() -> tuple[bool, str]:
        err = max(
            _rel(production.output(a, 3.7 * k, 3.7 * l, g, p), 3.7 * production.output(a, k, l, g, p))
            for a, k, l, g, p in draws
        )
        return err <= 1e-12, f"max rel err {err:.2e}"

    def labor_identity() -> tuple[bool, str]:
        ok = all(
            production.effective_labor(l, g) == l for l in (1.0, 50.0, 1e6) for g in (0.0, 0.3, 1.0, 7.0)  # noqa: E741
        )
        return ok, "12 grid points"

    _check(summary, "production", "agi round trip", round_trip)
    _check(summary, "production", "tfp residual round trip", residual)
    _check(summary, "production", "constant returns", homogeneity)
    _check(summary, "production", "effective labor identity", labor_identity)


def _inference_checks(summary: SelfcheckSummary) -> None:
    def small_example() -> tuple[bool, str]:
        rep = inference.infer([1.0, 2.0, 3.0], [2.0, 3.0, 5.0])
        ok = (
            abs(rep.fit.slope - 1.5) <= 1e-12
            and abs(rep.fit.intercept - 1.0 / 3.0) <= 1e-12
            and abs(rep.t_statistic - 3.0 * math.sqrt(3.0)) <= 1e-10
            and abs(rep.r_squared - 27.0 / 28.0) <= 1e-12
        )
        return ok, f"slope {rep.fit.slope!r}, t {rep.t_statistic!r}"

    def critical_values() -> tuple[bool, str]:
        ps = [inference.p_value_two_sided(t, df) for t, df in ((2.228, 10), (12.706, 1), (2.042, 30))]
        return all(abs(p - 0.05) <= 5e-4 for p in ps), ", ".join(f"{p:.5f}" for p in ps)

    def normal_equations() -> tuple[bool, str]:
        rng = random.Random(7)
        worst = 0.0
        for _ in range(50):
            n = rng.randint(3, 12)
            x = [rng.uniform(-10, 10) for _ in range(n)]
            y = [rng.uniform(-10, 10) for _ in range(n)]
            fit = inference.ols_fit(x, y)
            # Cramer's rule on the raw 2x2 normal equations
            sx, sy = math.fsum(x), math.fsum(y)
            sxx = math.fsum(v * v for v in x)
            sxy = math.fsum(u * v for u, v in zip(x, y))
            det = n * sxx - sx * sx
            b1 = (n * sxy - sx * sy) / det
            b0 = (sxx * sy - sx * sxy) / det
            worst = max(worst, abs(fit.slope - b1), abs(fit.intercept - b0))
        return worst <= 1e-9, f"max abs diff {worst:.2e}"

    _check(summary, "inference", "three-point example", small_example)
    _check(summary, "inference", "t critical values", critical_values)
    _check(summary, "inference", "normal equations oracle", normal_equations)


def _beta_checks(summary: SelfcheckSummary, tol: float) -> None:
    def cauchy() -> tuple[bool, str]:
        err = max(
            abs(2.0 * inference.student_t_sf(t, 1, tol=tol) - (1.0 - 2.0 / math.pi * math.atan(t)))
            for t in (0.25 * i for i in range(201))
        )
        return err <= 1e-10, f"max abs err {err:.2e}"

    def integer_shapes() -> tuple[bool, str]:
        # I_x(a, b) for integer shapes is a binomial tail
        err = 0.0
        for a in range(1, 8):
            for b in range(1, 8):
                m = a + b - 1
                for x in (0.05, 0.3, 0.5, 0.77, 0.95):
                    exact = math.fsum(math.comb(m, j) * x**j * (1 - x) ** (m - j) for j in range(a, m + 1))
                    got = inference.regularized_incomplete_beta(x, a, b, tol=tol)
                    err = max(err, abs(got - exact))
        return err <= 1e-12, f"max abs err {err:.2e}"

    def symmetry() -> tuple[bool, str]:
        err = 0.0
        for a in (0.5, 1.0, 2.5, 7.0):
            for b in (0.5, 1.0, 2.5, 7.0):
                for x in (0.1, 0.5, 0.9):
                    s = inference.regularized_incomplete_beta(x, a, b, tol=tol) + inference.regularized_incomplete_beta(
                        1.0 - x, b, a, tol=tol
                    )
                    err = max(err, abs(s - 1.0))
        return err <= 1e-12, f"max abs err {err:.2e}"

    _check(summary, "beta", "df=1 Cauchy closed form", cauchy)
    _check(summary, "beta", "integer-shape binomial identity", integer_shapes)
    _check(summary, "beta", "reflection symmetry", symmetry)


def _parse_checks(summary: SelfcheckSummary) -> None:
    def fred_round_trip() -> tuple[bool, str]:
        count = 0
        for path in sorted(snapshot_dir().glob("*.csv")):
            first = parse_fred_csv(path.read_bytes())
            if parse_fred_csv(to_fred_csv(first)) != first:
                return False, f"{path.name} changed on round trip"
            count += 1
        return count > 0, f"{count} bundled files"

    def gaps_round_trip() -> tuple[bool, str]:
        text = b"DATE,X\n2020-01-01,1.5\n2020-04-01,.\n2020-07-01,2.25\n2020-10-01,3.0\n"
        s = parse_fred_csv(text)
        return parse_fred_csv(to_fred_csv(s)) == s and len(s) == 3, "missing-marker rows"

    _check(summary, "parse", "bundled fred_csv round trip", fred_round_trip)
    _check(summary, "parse", "missing marker round trip", gaps_round_trip)


def selfcheck(beta_tol: float = inference.BETA_TOL) -> SelfcheckSummary:
    """Run the production, inference, incomplete-beta and parsing check suites.

    ``beta_tol`` is forwarded to the incomplete-beta kernel in the ``beta``
    suite; loosening it is how the suite's own failure path is exercised.
    """
    summary = SelfcheckSummary()
    _production_checks(summary)
    _inference_checks(summary)
    _beta_checks(summary, beta_tol)
    _parse_checks(summary)
    return summary
