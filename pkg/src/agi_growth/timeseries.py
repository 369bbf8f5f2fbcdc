"""Time-series data model: construction, annualization, alignment, transforms.

Periods are plain integers (calendar years) for annual series and
``(year, index)`` pairs for quarterly (index 1-4) and monthly (index 1-12)
series. Missing observations are absent, never encoded as sentinel values.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Union

from agi_growth.errors import DataError

Period = Union[int, tuple[int, int]]


class Frequency(str, enum.Enum):
    ANNUAL = "annual"
    QUARTERLY = "quarterly"
    MONTHLY = "monthly"

    @property
    def periods_per_year(self) -> int:
        return {"annual": 1, "quarterly": 4, "monthly": 12}[self.value]


class AnnualizeMethod(str, enum.Enum):
    MEAN = "mean"
    LAST = "last"
    SUM = "sum"


def period_year(period: Period) -> int:
    return period if isinstance(period, int) else period[0]


def format_period(period: Period) -> str:
    if isinstance(period, int):
        return str(period)
    return f"{period[0]}-{period[1]:02d}"


def _check_period(period: Period, frequency: Frequency) -> None:
    if frequency is Frequency.ANNUAL:
        if isinstance(period, bool) or not isinstance(period, int):
            raise DataError(f"period {period!r} is not a calendar year (annual series)")
        return
    if (
        not isinstance(period, tuple)
        or len(period) != 2
        or not all(isinstance(p, int) and not isinstance(p, bool) for p in period)
    ):
        raise DataError(f"period {period!r} is not a (year, index) pair ({frequency.value} series)")
    if not 1 <= period[1] <= frequency.periods_per_year:
        raise DataError(
            f"period {format_period(period)} out of range for {frequency.value} series"
        )


@dataclass(frozen=True)
class Series:
    """A named, unit-tagged sequence of ``(period, value)`` observations.

    Construct through :func:`make_series`, which sorts its input; the
    constructor itself only validates.
    """

    name: str
    unit: str
    frequency: Frequency
    observations: tuple[tuple[Period, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "frequency", Frequency(self.frequency))
        if not self.observations:
            raise DataError(f"series {self.name!r}: no observations")
        prev = None
        for period, value in self.observations:
            _check_period(period, self.frequency)
            if not math.isfinite(value):
                raise DataError(
                    f"series {self.name!r}: non-finite value at period {format_period(period)}"
                )
            if prev is not None:
                if period == prev:
                    raise DataError(
                        f"series {self.name!r}: duplicate period {format_period(period)}"
                    )
                if period < prev:
                    raise DataError(f"series {self.name!r}: periods not increasing")
            prev = period

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def periods(self) -> list[Period]:
        return [p for p, _ in self.observations]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.observations]

    def as_dict(self) -> dict[Period, float]:
        return dict(self.observations)


def make_series(
    name: str,
    unit: str,
    frequency: Frequency | str,
    points: Iterable[tuple[Period, float]],
) -> Series:
    """Build a validated :class:`Series` from unordered ``(period, value)`` points.

    Raises:
        DataError: on empty input, a duplicated period or a non-finite value.
            The message names the offending period.
    """
    frequency = Frequency(frequency)
    pts = [(p if isinstance(p, int) else tuple(p), float(v)) for p, v in points]
    if not pts:
        raise DataError(f"series {name!r}: no observations")
    for period, _ in pts:
        _check_period(period, frequency)
    pts.sort(key=lambda pv: pv[0])
    seen = set()
    for period, value in pts:
        if period in seen:
            raise DataError(f"duplicate period {format_period(period)}")
        seen.add(period)
        if not math.isfinite(value):
            raise DataError(f"non-finite value at period {format_period(period)}")
    return Series(name=name, unit=unit, frequency=frequency, observations=tuple(pts))


def to_annual(s: Series, method: AnnualizeMethod | str = AnnualizeMethod.MEAN) -> Series:
    """Collapse a quarterly or monthly series to calendar years.

    Years missing any sub-period are dropped rather than partially aggregated.
    """
    method = AnnualizeMethod(method)
    if s.frequency is Frequency.ANNUAL:
        raise DataError(f"series {s.name!r} is already annual")
    per_year = s.frequency.periods_per_year
    by_year: dict[int, list[float]] = {}
    for (year, _), value in s.observations:
        by_year.setdefault(year, []).append(value)

    points = []
    for year, vals in by_year.items():
        if len(vals) != per_year:
            continue
        if method is AnnualizeMethod.MEAN:
            # two-pass mean keeps constant inputs exact
            agg = math.fsum(vals) / per_year
        elif method is AnnualizeMethod.LAST:
            agg = vals[-1]
        else:
            agg = math.fsum(vals)
        points.append((year, agg))
    if not points:
        raise DataError(f"series {s.name!r}: no complete calendar year to annualize")
    return make_series(s.name, s.unit, Frequency.ANNUAL, points)


def clip(s: Series, first: int | None = None, last: int | None = None) -> Series:
    """Restrict a series to periods whose calendar year lies in ``[first, last]``."""
    kept = [
        (p, v)
        for p, v in s.observations
        if (first is None or period_year(p) >= first) and (last is None or period_year(p) <= last)
    ]
    if not kept:
        raise DataError(f"series {s.name!r}: no observations in window {first}-{last}")
    return Series(s.name, s.unit, s.frequency, tuple(kept))


MIN_PANEL_LENGTH = 3


@dataclass(frozen=True)
class AlignedPanel:
    """Year-joined model variables: real GDP ``y``, capital ``k``, labor ``l``, TFP ``a``."""

    years: tuple[int, ...]
    y: tuple[float, ...]
    k: tuple[float, ...]
    l: tuple[float, ...]  # noqa: E741
    a: tuple[float, ...]

    COLUMNS = ("y", "k", "l", "a")

    def __post_init__(self) -> None:
        for col in ("years",) + self.COLUMNS:
            object.__setattr__(self, col, tuple(getattr(self, col)))
        n = len(self.years)
        if n < MIN_PANEL_LENGTH:
            raise DataError(f"sample too short: {n} years, need at least {MIN_PANEL_LENGTH}")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise DataError("panel years must be strictly increasing")
        for col in self.COLUMNS:
            values = getattr(self, col)
            if len(values) != n:
                raise DataError(f"column {col} has {len(values)} values for {n} years")
            for year, v in zip(self.years, values):
                if not (math.isfinite(v) and v > 0):
                    raise DataError(f"non-positive value in {col} at {year}")

    def __len__(self) -> int:
        return len(self.years)

    def column_series(self, col: str, unit: str = "") -> Series:
        return Series(col, unit, Frequency.ANNUAL, tuple(zip(self.years, getattr(self, col))))

    def clip(self, first: int | None = None, last: int | None = None) -> AlignedPanel:
        idx = [
            i
            for i, yr in enumerate(self.years)
            if (first is None or yr >= first) and (last is None or yr <= last)
        ]
        return AlignedPanel(
            years=[self.years[i] for i in idx],
            **{c: [getattr(self, c)[i] for i in idx] for c in self.COLUMNS},
        )


def align(y: Series, k: Series, l: Series, a: Series) -> AlignedPanel:  # noqa: E741
    """Inner-join four annual series on calendar year.

    Raises:
        DataError: if any input is not annual, the common window has fewer
            than three years ("sample too short"), or a value in the common
            window is not strictly positive.
    """
    named = {"y": y, "k": k, "l": l, "a": a}
    for col, s in named.items():
        if s.frequency is not Frequency.ANNUAL:
            raise DataError(f"series {col} ({s.name}) is {s.frequency.value}, expected annual")
    maps = {col: s.as_dict() for col, s in named.items()}
    common = set(maps["y"])
    for m in maps.values():
        common &= set(m)
    years = sorted(common)
    if len(years) < MIN_PANEL_LENGTH:
        raise DataError(
            f"sample too short: {len(years)} overlapping years, need at least {MIN_PANEL_LENGTH}"
        )
    for year in years:
        for col in AlignedPanel.COLUMNS:
            if not maps[col][year] > 0:
                raise DataError(f"non-positive value in {col} at {year}")
    return AlignedPanel(years=years, **{c: [maps[c][yr] for yr in years] for c in maps})


def log_transform(values: Sequence[float]) -> list[float]:
    """Elementwise natural logarithm of strictly positive values."""
    out = []
    for i, v in enumerate(values):
        if not v > 0:
            raise DataError(f"log of non-positive value {v!r} at index {i}")
        out.append(math.log(v))
    return out


def pct_change(s: Series) -> Series:
    """Percent change between consecutive observations, stamped at the later period."""
    if len(s) < 2:
        raise DataError(f"series {s.name!r}: pct_change needs at least 2 observations")
    points = []
    for (_, prev), (period, cur) in zip(s.observations, s.observations[1:]):
        if prev == 0:
            raise DataError(
                f"series {s.name!r}: zero base value before period {format_period(period)}"
            )
        points.append((period, 100.0 * (cur - prev) / prev))
    return Series(f"{s.name}_pct", "percent", s.frequency, tuple(points))
