"""File formats and run configuration.

Two CSV layouts are read. ``fred_csv`` is the FRED download layout, a
``DATE,<SERIES_ID>`` header followed by ``YYYY-MM-DD,<value>`` rows with
``.`` marking a missing observation. ``generic_csv`` is any header-bearing
CSV with caller-named date and value columns.

A run is described by a JSON config that maps four source files onto the
model variables. See :func:`load_config` for the accepted keys.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from agi_growth.errors import ConfigError, DataError
from agi_growth.production import DEFAULT_ALPHA, Mode
from agi_growth.timeseries import (
    AlignedPanel,
    AnnualizeMethod,
    Frequency,
    Period,
    Series,
    align,
    clip,
    make_series,
    to_annual,
)

logger = logging.getLogger(__name__)

FRED_DATE_HEADERS = ("date", "observation_date")
FRED_MISSING = "."
_SPACING_TO_FREQUENCY = {12: Frequency.ANNUAL, 3: Frequency.QUARTERLY, 1: Frequency.MONTHLY}


class SourceFormat(str, enum.Enum):
    FRED_CSV = "fred_csv"
    GENERIC_CSV = "generic_csv"


class Variable(str, enum.Enum):
    GDP = "gdp"
    CAPITAL = "capital"
    LABOR = "labor"
    TFP = "tfp"


class Orientation(str, enum.Enum):
    GDP_ON_AGI = "gdp_on_agi"
    AGI_ON_GDP = "agi_on_gdp"


class ReportFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"


# ---------------------------------------------------------------------------
# CSV parsing


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DataError(f"input is not valid UTF-8: {exc}") from exc


def _parse_value(text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"line {lineno}: unparseable value {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"line {lineno}: non-finite value {text!r}")
    return value


def _parse_date(text: str, lineno: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise DataError(f"line {lineno}: unparseable date {text!r}") from None


def _month_index(d: dt.date) -> int:
    return d.year * 12 + d.month - 1


def _infer_frequency(dates: list[tuple[int, dt.date]]) -> Frequency:
    if len(dates) < 2:
        # a lone observation carries no spacing information
        return Frequency.ANNUAL
    spacing = None
    for (_, prev), (lineno, cur) in zip(dates, dates[1:]):
        gap = _month_index(cur) - _month_index(prev)
        if spacing is None:
            if gap not in _SPACING_TO_FREQUENCY:
                raise DataError(f"line {lineno}: unsupported date spacing of {gap} months")
            spacing = gap
        elif gap != spacing:
            raise DataError(
                f"line {lineno}: inconsistent date spacing ({gap} months, expected {spacing})"
            )
    return _SPACING_TO_FREQUENCY[spacing]


def _date_to_period(d: dt.date, frequency: Frequency, lineno: int) -> Period:
    if d.day != 1:
        raise DataError(f"line {lineno}: date {d.isoformat()} is not the first of a period")
    if frequency is Frequency.ANNUAL:
        return d.year
    if frequency is Frequency.QUARTERLY:
        if d.month not in (1, 4, 7, 10):
            raise DataError(f"line {lineno}: date {d.isoformat()} does not start a quarter")
        return (d.year, (d.month - 1) // 3 + 1)
    return (d.year, d.month)


def _period_to_date(period: Period, frequency: Frequency) -> dt.date:
    if frequency is Frequency.ANNUAL:
        return dt.date(period, 1, 1)
    year, idx = period
    month = 3 * (idx - 1) + 1 if frequency is Frequency.QUARTERLY else idx
    return dt.date(year, month, 1)


def _build_series(
    name: str,
    unit: str,
    rows: list[tuple[int, dt.date, float | None]],
    frequency: Frequency | None,
) -> Series:
    if frequency is None:
        frequency = _infer_frequency([(lineno, d) for lineno, d, _ in rows])
    points = [
        (_date_to_period(d, frequency, lineno), v) for lineno, d, v in rows if v is not None
    ]
    if not points:
        raise DataError(f"series {name!r}: no observations")
    return make_series(name, unit, frequency, points)


def parse_fred_csv(data: bytes, unit: str = "") -> Series:
    """Parse a FRED ``DATE,<ID>`` download into a :class:`Series` named ``<ID>``.

    Frequency is inferred from the spacing of the dates, counting rows whose
    value is the missing marker ``.``; those rows contribute no observation.
    """
    reader = csv.reader(io.StringIO(_decode(data), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("line 1: empty file, expected header 'DATE,<SERIES_ID>'") from None
    if len(header) != 2 or header[0].strip().lower() not in FRED_DATE_HEADERS or not header[1].strip():
        raise DataError(f"line 1: malformed header {','.join(header)!r}, expected 'DATE,<SERIES_ID>'")
    name = header[1].strip()

    rows: list[tuple[int, dt.date, float | None]] = []
    for lineno, record in enumerate(reader, start=2):
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        if len(record) != 2:
            raise DataError(f"line {lineno}: expected 2 fields, got {len(record)}")
        date_text, value_text = (f.strip() for f in record)
        d = _parse_date(date_text, lineno)
        value = None if value_text == FRED_MISSING else _parse_value(value_text, lineno)
        rows.append((lineno, d, value))
    return _build_series(name, unit, rows, None)


def to_fred_csv(s: Series) -> bytes:
    """Serialize a series in FRED layout; interior gaps are written as ``.`` rows."""
    lines = [f"DATE,{s.name}"]
    values = s.as_dict()
    first, last = s.periods[0], s.periods[-1]
    period = first
    while True:
        value = values.get(period)
        text = FRED_MISSING if value is None else repr(value)
        lines.append(f"{_period_to_date(period, s.frequency).isoformat()},{text}")
        if period == last:
            break
        period = _next_period(period, s.frequency)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _next_period(period: Period, frequency: Frequency) -> Period:
    if frequency is Frequency.ANNUAL:
        return period + 1
    year, idx = period
    if idx == frequency.periods_per_year:
        return (year + 1, 1)
    return (year, idx + 1)


def parse_generic_csv(
    data: bytes,
    date_column: str,
    value_column: str,
    frequency: Frequency | str | None = None,
    unit: str = "",
) -> Series:
    """Read one date column and one value column from a header-bearing CSV.

    Dates are either bare years (annual) or ``YYYY-MM-DD``; for the latter the
    frequency is inferred from date spacing unless given. Empty cells and
    ``.`` are treated as missing.
    """
    reader = csv.DictReader(io.StringIO(_decode(data), newline=""))
    headers = [h.strip() for h in (reader.fieldnames or [])]
    reader.fieldnames = headers
    for col in (date_column, value_column):
        if col not in headers:
            raise DataError(f"column {col!r} not found; available: {', '.join(headers)}")

    rows: list[tuple[int, dt.date, float | None]] = []
    bare_years = None
    for lineno, record in enumerate(reader, start=2):
        date_text = (record.get(date_column) or "").strip()
        value_text = (record.get(value_column) or "").strip()
        if not date_text:
            if not value_text:
                continue
            raise DataError(f"line {lineno}: missing date")
        is_year = date_text.isdigit() and len(date_text) == 4
        if bare_years is None:
            bare_years = is_year
        elif bare_years != is_year:
            raise DataError(f"line {lineno}: mixed date formats")
        d = dt.date(int(date_text), 1, 1) if is_year else _parse_date(date_text, lineno)
        value = None if value_text in ("", FRED_MISSING) else _parse_value(value_text, lineno)
        rows.append((lineno, d, value))

    if frequency is not None:
        frequency = Frequency(frequency)
    if bare_years:
        if frequency not in (None, Frequency.ANNUAL):
            raise DataError(f"bare-year dates cannot carry {frequency.value} frequency")
        frequency = Frequency.ANNUAL
    return _build_series(value_column, unit, rows, frequency)


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class SourceSpec:
    path: str
    format: SourceFormat
    variable: Variable
    frequency: Frequency
    annualize: AnnualizeMethod = AnnualizeMethod.MEAN
    value_column: str | None = None
    date_column: str | None = None
    unit: str = ""

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "path": self.path,
            "format": self.format.value,
            "variable": self.variable.value,
            "frequency": self.frequency.value,
            "annualize": self.annualize.value,
        }
        if self.format is SourceFormat.GENERIC_CSV:
            d["date_column"] = self.date_column
            d["value_column"] = self.value_column
        d["unit"] = self.unit
        return d


@dataclass(frozen=True)
class OutputSpec:
    format: ReportFormat = ReportFormat.JSON
    path: str | None = None


AlphaSetting = Union[float, str]


@dataclass(frozen=True)
class PipelineConfig:
    sources: tuple[SourceSpec, ...]
    alpha: AlphaSetting = DEFAULT_ALPHA
    inversion_mode: Mode = Mode.CONSISTENT
    residual_mode: Mode = Mode.CONSISTENT
    regression_orientation: Orientation = Orientation.GDP_ON_AGI
    sample_window: tuple[int, int] | None = None
    output: OutputSpec = field(default_factory=OutputSpec)
    # directory that relative source paths are resolved against; not echoed
    base_dir: Path | None = field(default=None, compare=False)

    def source_for(self, variable: Variable) -> SourceSpec:
        return next(s for s in self.sources if s.variable is variable)

    def resolve(self, path: str) -> Path:
        p = Path(path)
        if self.base_dir is not None and not p.is_absolute():
            p = self.base_dir / p
        return p

    def to_dict(self) -> dict[str, Any]:
        return {
            "sources": [s.to_dict() for s in self.sources],
            "alpha": self.alpha,
            "inversion_mode": self.inversion_mode.value,
            "residual_mode": self.residual_mode.value,
            "regression_orientation": self.regression_orientation.value,
            "sample_window": list(self.sample_window) if self.sample_window else None,
            "output": {"format": self.output.format.value, "path": self.output.path},
        }


_SOURCE_KEYS = {"path", "format", "variable", "frequency", "annualize", "date_column", "value_column", "unit"}
_TOP_KEYS = {
    "sources",
    "alpha",
    "inversion_mode",
    "residual_mode",
    "regression_orientation",
    "sample_window",
    "output",
}


def _enum(cls: type[enum.Enum], value: Any, path: str) -> Any:
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        raise ConfigError(f"invalid value {value!r} at {path}; expected one of: {allowed}") from None


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise ConfigError(f"expected a non-empty string at {path}")
    return value


def _check_keys(obj: Any, allowed: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"expected an object at {path}")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown field at {path}.{key}")


def _parse_source(obj: Any, path: str) -> SourceSpec:
    _check_keys(obj, _SOURCE_KEYS, path)
    for key in ("path", "format", "variable", "frequency"):
        if key not in obj:
            raise ConfigError(f"missing required field at {path}.{key}")
    fmt = _enum(SourceFormat, obj["format"], f"{path}.format")
    date_col = obj.get("date_column")
    value_col = obj.get("value_column")
    if fmt is SourceFormat.GENERIC_CSV:
        date_col = _string(date_col, f"{path}.date_column")
        value_col = _string(value_col, f"{path}.value_column")
    else:
        for key in ("date_column", "value_column"):
            if key in obj:
                raise ConfigError(f"{path}.{key} is not allowed for fred_csv sources")
    unit = obj.get("unit", "")
    if not isinstance(unit, str):
        raise ConfigError(f"expected a string at {path}.unit")
    return SourceSpec(
        path=_string(obj["path"], f"{path}.path"),
        format=fmt,
        variable=_enum(Variable, obj["variable"], f"{path}.variable"),
        frequency=_enum(Frequency, obj["frequency"], f"{path}.frequency"),
        annualize=_enum(AnnualizeMethod, obj.get("annualize", "mean"), f"{path}.annualize"),
        value_column=value_col,
        date_column=date_col,
        unit=unit,
    )


def load_config(data: bytes, base_dir: str | Path | None = None) -> PipelineConfig:
    """Validate a JSON run configuration and apply defaults.

    Accepted document::

        {"sources": [{"path", "format", "variable", "frequency",
                      "annualize"?, "date_column"?, "value_column"?, "unit"?} x4],
         "alpha"?: number | "estimate",
         "inversion_mode"?, "residual_mode"?: "consistent" | "paper_literal",
         "regression_orientation"?: "gdp_on_agi" | "agi_on_gdp",
         "sample_window"?: [first, last],
         "output"?: {"format": "json" | "csv", "path"?: string}}

    Relative source paths are resolved against ``base_dir`` when one is given.

    Raises:
        ConfigError: naming the JSON path (``$.alpha``, ``$.sources[2].format``)
            of the first offending field.
    """
    try:
        doc = json.loads(_decode(data))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _check_keys(doc, _TOP_KEYS, "$")

    raw_sources = doc.get("sources")
    if not isinstance(raw_sources, list):
        raise ConfigError("expected a list of sources at $.sources")
    sources = tuple(_parse_source(s, f"$.sources[{i}]") for i, s in enumerate(raw_sources))
    seen: set[Variable] = set()
    for s in sources:
        if s.variable in seen:
            raise ConfigError(f"duplicate variable {s.variable.value} at $.sources")
        seen.add(s.variable)
    missing = [v.value for v in Variable if v not in seen]
    if missing:
        raise ConfigError(f"missing source for variable(s) {', '.join(missing)} at $.sources")

    alpha: AlphaSetting = doc.get("alpha", DEFAULT_ALPHA)
    if alpha != "estimate":
        if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
            raise ConfigError('expected a number or "estimate" at $.alpha')
        if not 0.0 < alpha < 1.0:
            raise ConfigError("alpha out of (0,1) at $.alpha")
        alpha = float(alpha)

    window = doc.get("sample_window")
    if window is not None:
        if (
            not isinstance(window, list)
            or len(window) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in window)
        ):
            raise ConfigError("expected [first_year, last_year] at $.sample_window")
        if window[0] > window[1]:
            raise ConfigError("first year after last year at $.sample_window")
        window = (window[0], window[1])

    out = doc.get("output", {})
    _check_keys(out, {"format", "path"}, "$.output")
    out_path = out.get("path")
    if out_path is not None:
        out_path = _string(out_path, "$.output.path")

    return PipelineConfig(
        sources=sources,
        alpha=alpha,
        inversion_mode=_enum(Mode, doc.get("inversion_mode", "consistent"), "$.inversion_mode"),
        residual_mode=_enum(Mode, doc.get("residual_mode", "consistent"), "$.residual_mode"),
        regression_orientation=_enum(
            Orientation, doc.get("regression_orientation", "gdp_on_agi"), "$.regression_orientation"
        ),
        sample_window=window,
        output=OutputSpec(_enum(ReportFormat, out.get("format", "json"), "$.output.format"), out_path),
        base_dir=Path(base_dir) if base_dir is not None else None,
    )


def load_config_file(path: str | Path) -> PipelineConfig:
    path = Path(path)
    return load_config(path.read_bytes(), base_dir=path.parent)


# ---------------------------------------------------------------------------
# Assembly


def read_source(spec: SourceSpec, config: PipelineConfig) -> Series:
    """Parse one source file and return it as an annual series."""
    path = config.resolve(spec.path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DataError(f"{spec.path}: cannot read source file ({exc.strerror})") from exc
    try:
        if spec.format is SourceFormat.FRED_CSV:
            series = parse_fred_csv(data, unit=spec.unit)
        else:
            series = parse_generic_csv(
                data, spec.date_column, spec.value_column, spec.frequency, unit=spec.unit
            )
        if series.frequency is not spec.frequency:
            raise DataError(
                f"declared frequency {spec.frequency.value} but file is {series.frequency.value}"
            )
        if series.frequency is not Frequency.ANNUAL:
            series = to_annual(series, spec.annualize)
    except DataError as exc:
        raise DataError(f"{spec.path}: {exc}") from exc
    logger.debug("read %s: %d annual observations", spec.path, len(series))
    return series


_VARIABLE_COLUMN = {Variable.GDP: "y", Variable.CAPITAL: "k", Variable.LABOR: "l", Variable.TFP: "a"}


def assemble(config: PipelineConfig) -> AlignedPanel:
    """Read, annualize, window-clip and align the four configured sources."""
    columns = {}
    for variable in Variable:
        spec = config.source_for(variable)
        series = read_source(spec, config)
        if config.sample_window is not None:
            try:
                series = clip(series, *config.sample_window)
            except DataError as exc:
                raise DataError(f"{spec.path}: {exc}") from exc
        columns[_VARIABLE_COLUMN[variable]] = series
    return align(**columns)
