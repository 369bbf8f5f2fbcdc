"""Cobb-Douglas production with AGI-augmented labor.

Output is ``Y = A * K**alpha * (L * AGI)**(1 - alpha)``. This module evaluates
it, inverts it for the AGI technology level, recovers the TFP residual, and
estimates the capital elasticity from data.

Two readings exist for the inversion and the residual. ``consistent`` (the
default) is the exact algebraic inverse of the production function;
``paper_literal`` keeps the published typesetting, where the exponent
``1 / (1 - alpha)`` applies to the denominator only and the residual is
written as inputs over output with ``L`` outside the exponent.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from agi_growth import inference
from agi_growth.errors import DataError, DomainError
from agi_growth.timeseries import AlignedPanel, log_transform, pct_change

DEFAULT_ALPHA = 0.33
DEFAULT_ALPHA_PROVENANCE = "conventional capital share, user-overridable"


class Mode(str, enum.Enum):
    CONSISTENT = "consistent"
    PAPER_LITERAL = "paper_literal"


@dataclass(frozen=True)
class ModelParams:
    alpha: float = DEFAULT_ALPHA
    inversion_mode: Mode = Mode.CONSISTENT
    residual_mode: Mode = Mode.CONSISTENT

    def __post_init__(self) -> None:
        object.__setattr__(self, "inversion_mode", Mode(self.inversion_mode))
        object.__setattr__(self, "residual_mode", Mode(self.residual_mode))
        if not (isinstance(self.alpha, (int, float)) and 0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie strictly inside (0, 1), got {self.alpha!r}")


@dataclass(frozen=True)
class IndexResult:
    years: tuple[int, ...]
    agi: tuple[float, ...]
    tfp_residual: tuple[float, ...]
    effective_labor: tuple[float, ...]
    params: ModelParams
    source_window: tuple[int, int] = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.years)
        for name in ("agi", "tfp_residual", "effective_labor"):
            col = getattr(self, name)
            if len(col) != n:
                raise DataError(f"{name} has {len(col)} values for {n} years")
            for year, v in zip(self.years, col):
                if not (math.isfinite(v) and v > 0):
                    raise DomainError(f"{name} is not finite and positive at {year}: {v!r}")
        object.__setattr__(self, "source_window", (self.years[0], self.years[-1]))


@dataclass(frozen=True)
class ElasticityEstimate:
    pointwise: tuple[tuple[int, float], ...]
    regression_estimate: float
    method_note: str


def _require_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be finite and positive, got {value!r}")


def output(a: float, k: float, l: float, agi: float, params: ModelParams) -> float:  # noqa: E741
    """Real output ``a * k**alpha * (l * agi)**(1 - alpha)``."""
    _require_positive(a=a, k=k, l=l, agi=agi)
    alpha = params.alpha
    return a * k**alpha * (l * agi) ** (1.0 - alpha)


def agi_index(y: float, a: float, k: float, l: float, params: ModelParams) -> float:  # noqa: E741
    """AGI technology level implied by output ``y`` and inputs ``a``, ``k``, ``l``."""
    _require_positive(y=y, a=a, k=k, l=l)
    alpha = params.alpha
    expo = 1.0 / (1.0 - alpha)
    base = a * k**alpha * l ** (1.0 - alpha)
    if params.inversion_mode is Mode.CONSISTENT:
        return (y / base) ** expo
    return y / base**expo


def tfp_residual(y: float, k: float, l: float, agi: float, params: ModelParams) -> float:  # noqa: E741
    """Total factor productivity left over after capital and effective labor."""
    _require_positive(y=y, k=k, l=l, agi=agi)
    alpha = params.alpha
    if params.residual_mode is Mode.CONSISTENT:
        return y / (k**alpha * (l * agi) ** (1.0 - alpha))
    return k**alpha * l * agi ** (1.0 - alpha) / y


def effective_labor(l: float, agi: float) -> float:  # noqa: E741
    """Human plus AGI labor, ``l*agi + (1 - agi)*l``.

    Kept in its written form even though it reduces to ``l`` for every
    ``agi``.
    """
    _require_positive(l=l)
    if not math.isfinite(agi):
        raise DomainError(f"agi must be finite, got {agi!r}")
    return l * agi + (1.0 - agi) * l


def elasticity_pointwise(y_pct: Sequence[float], k_pct: Sequence[float]) -> list[float | None]:
    """Ratio of output to capital percent changes; ``None`` where capital did not move."""
    if len(y_pct) != len(k_pct):
        raise DataError(f"length mismatch: {len(y_pct)} output vs {len(k_pct)} capital changes")
    return [None if kc == 0 else yc / kc for yc, kc in zip(y_pct, k_pct)]


def elasticity_regression(panel: AlignedPanel) -> ElasticityEstimate:
    """Estimate the capital elasticity as the OLS slope of Δln y on Δln k.

    The per-year percent-change ratios are returned alongside for comparison.
    """
    if len(panel) < 4:
        raise DataError(f"sample too short: elasticity needs at least 4 years, got {len(panel)}")
    ln_y = log_transform(panel.y)
    ln_k = log_transform(panel.k)
    dy = [b - a for a, b in zip(ln_y, ln_y[1:])]
    dk = [b - a for a, b in zip(ln_k, ln_k[1:])]
    try:
        fit = inference.ols_fit(dk, dy)
    except DataError as exc:
        if "degenerate" in str(exc):
            raise DataError("zero variance in capital log-growth; elasticity not identified") from exc
        raise

    y_pct = pct_change(panel.column_series("y"))
    k_pct = pct_change(panel.column_series("k"))
    ratios = elasticity_pointwise(y_pct.values, k_pct.values)
    pointwise = tuple((yr, r) for yr, r in zip(y_pct.periods, ratios) if r is not None)
    return ElasticityEstimate(
        pointwise=pointwise,
        regression_estimate=fit.slope,
        method_note="OLS slope of year-on-year log change in output on log change in capital",
    )


def compute_index(panel: AlignedPanel, params: ModelParams) -> IndexResult:
    """Per-year AGI level, recomputed TFP residual and effective labor."""
    agi_col, tfp_col, eff_col = [], [], []
    for year, y, k, l, a in zip(panel.years, panel.y, panel.k, panel.l, panel.a):  # noqa: E741
        try:
            if not l > 0:
                raise DomainError(f"non-positive value in l at {year}")
            agi = agi_index(y, a, k, l, params)
            agi_col.append(agi)
            tfp_col.append(tfp_residual(y, k, l, agi, params))
            eff_col.append(effective_labor(l, agi))
        except DomainError as exc:
            raise DomainError(f"year {year}: {exc}") from exc
    return IndexResult(
        years=tuple(panel.years),
        agi=tuple(agi_col),
        tfp_residual=tuple(tfp_col),
        effective_labor=tuple(eff_col),
        params=params,
    )


def synthesize_panel(
    years: Sequence[int],
    a_path: Sequence[float],
    k_path: Sequence[float],
    l_path: Sequence[float],
    agi_path: Sequence[float],
    params: ModelParams,
) -> AlignedPanel:
    """Panel whose output column is generated exactly from the given input paths."""
    n = len(years)
    lengths = {len(a_path), len(k_path), len(l_path), len(agi_path)}
    if lengths != {n}:
        raise DataError(f"path lengths differ from {n} years: {sorted(lengths)}")
    y = [output(a, k, l, g, params) for a, k, l, g in zip(a_path, k_path, l_path, agi_path)]
    return AlignedPanel(years=list(years), y=y, k=list(k_path), l=list(l_path), a=list(a_path))
