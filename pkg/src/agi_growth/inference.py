"""Simple OLS with Pearson correlation, R², t-statistic and two-sided p-value.

Everything here is written from scratch on top of :mod:`math`; the Student-t
tail comes from a continued-fraction regularized incomplete beta.  Sums are
mean-centered in two passes (means first, then centered products).
"""

from __future__ import annotations

import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass

from agi_growth.errors import ConvergenceError, DataError, DomainError

EPS = sys.float_info.epsilon
# p-value reported for a perfect fit: the smallest positive double
PERFECT_FIT_P = math.ulp(0.0)
# residuals below this multiple of eps * data scale count as a perfect fit
PERFECT_FIT_ULPS = 64.0
BETA_TOL = 1e-15
BETA_MAX_ITER = 10_000
_FPMIN = 1e-300


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    x_mean: float
    y_mean: float
    residuals: tuple[float, ...]
    sxx: float
    n: int
    perfect_fit: bool = False

    @property
    def sse(self) -> float:
        return math.fsum(e * e for e in self.residuals)


@dataclass(frozen=True)
class InferenceReport:
    fit: RegressionFit
    pearson_r: float
    r_squared: float
    t_statistic: float
    p_value: float
    degrees_of_freedom: int
    standard_error: float

    @property
    def perfect_fit(self) -> bool:
        return self.fit.perfect_fit


def _check_pair(x: Sequence[float], y: Sequence[float], min_n: int) -> tuple[list[float], list[float]]:
    if len(x) != len(y):
        raise DataError(f"length mismatch: {len(x)} x values, {len(y)} y values")
    if len(x) < min_n:
        raise DataError(f"sample too short: n={len(x)}, need at least {min_n}")
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if not all(math.isfinite(v) for v in xs + ys):
        raise DataError("non-finite value in regression data")
    return xs, ys


def _centered_sums(xs: list[float], ys: list[float]) -> tuple[float, float, float, float, float]:
    n = len(xs)
    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    dx = [v - x_mean for v in xs]
    dy = [v - y_mean for v in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    return x_mean, y_mean, sxx, syy, sxy


def ols_fit(x: Sequence[float], y: Sequence[float]) -> RegressionFit:
    """Least-squares line ``y = intercept + slope * x``.

    Raises:
        DataError: on length mismatch, ``n < 3`` ("sample too short") or a
            constant regressor ("degenerate regressor").
    """
    xs, ys = _check_pair(x, y, 3)
    x_mean, y_mean, sxx, _, sxy = _centered_sums(xs, ys)
    if sxx == 0.0:
        raise DataError("degenerate regressor: x has zero variance")
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    residuals = tuple(yi - (intercept + slope * xi) for xi, yi in zip(xs, ys))

    scale = max(abs(v) for v in ys) + abs(intercept) + abs(slope) * max(abs(v) for v in xs)
    perfect = max(abs(e) for e in residuals) <= PERFECT_FIT_ULPS * EPS * scale
    return RegressionFit(slope, intercept, x_mean, y_mean, residuals, sxx, len(xs), perfect)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation coefficient of two equal-length samples."""
    xs, ys = _check_pair(x, y, 2)
    _, _, sxx, syy, sxy = _centered_sums(xs, ys)
    if sxx == 0.0 or syy == 0.0:
        raise DataError("correlation undefined: zero variance input")
    r = sxy / math.sqrt(sxx * syy)
    if abs(r) > 1.0:
        if abs(r) - 1.0 > 1e-12:
            raise ArithmeticError(f"correlation {r!r} outside [-1, 1]")
        r = math.copysign(1.0, r)
    return r


def r_squared(x: Sequence[float], y: Sequence[float]) -> float:
    return pearson(x, y) ** 2


def slope_standard_error(fit: RegressionFit) -> float:
    if fit.n < 3:
        raise DataError("sample too short: need n >= 3 for a standard error")
    return math.sqrt(fit.sse / (fit.n - 2) / fit.sxx)


def t_statistic(fit: RegressionFit) -> float:
    """t-statistic of the slope against zero.

    A perfect fit returns a signed infinity; :func:`p_value_two_sided` maps it
    to :data:`PERFECT_FIT_P`.
    """
    if fit.n < 3:
        raise DataError("sample too short: need n >= 3 for a t-statistic")
    if fit.perfect_fit:
        if fit.slope == 0.0:
            raise DomainError("t-statistic undefined: y is constant")
        return math.copysign(math.inf, fit.slope)
    se = slope_standard_error(fit)
    if se == 0.0:
        return math.copysign(math.inf, fit.slope)
    return fit.slope / se


def _beta_cf(a: float, b: float, x: float, tol: float, max_iter: int) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge in {max_iter} iterations "
        f"(a={a}, b={b}, x={x})"
    )


def _betainc(
    x: float, xc: float, a: float, b: float, tol: float, max_iter: int
) -> float:
    # xc is 1 - x, passed separately so callers can supply it without cancellation
    if x == 0.0:
        return 0.0
    if xc == 0.0:
        return 1.0
    log_front = (
        a * math.log(x) + b * math.log(xc) - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        value = front * _beta_cf(a, b, x, tol, max_iter) / a
    else:
        value = 1.0 - front * _beta_cf(b, a, xc, tol, max_iter) / b
    return min(1.0, max(0.0, value))


def regularized_incomplete_beta(
    x: float,
    a: float,
    b: float,
    *,
    tol: float = BETA_TOL,
    max_iter: int = BETA_MAX_ITER,
) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``.

    The continued fraction is evaluated directly when ``x`` lies below
    ``(a + 1) / (a + b + 2)`` and through ``1 - I_{1-x}(b, a)`` otherwise.

    Args:
        x: Integration limit in ``[0, 1]``.
        a, b: Positive shape parameters.
        tol: Relative convergence threshold for the continued fraction.
        max_iter: Iteration cap; exceeding it raises :class:`ConvergenceError`.
    """
    if not (math.isfinite(x) and 0.0 <= x <= 1.0):
        raise DomainError(f"incomplete beta: x={x!r} outside [0, 1]")
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"incomplete beta: shape parameters must be positive (a={a!r}, b={b!r})")
    return _betainc(x, 1.0 - x, a, b, tol, max_iter)


def student_t_sf(t: float, df: float, *, tol: float = BETA_TOL) -> float:
    """Upper tail ``P(T > t)`` of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise DomainError(f"degrees of freedom must be positive, got {df!r}")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    # w = df / (df + t^2) and its complement, each formed without cancellation
    w = df / (df + t2)
    wc = t2 / (df + t2)
    half_tail = 0.5 * _betainc(w, wc, 0.5 * df, 0.5, tol, BETA_MAX_ITER)
    return half_tail if t >= 0 else 1.0 - half_tail


def p_value_two_sided(t: float, df: int, *, tol: float = BETA_TOL) -> float:
    """Two-sided p-value ``2 * P(T > |t|)``.

    ``t = 0`` gives exactly 1.0. An infinite ``t`` (perfect fit) and any tail
    that underflows give :data:`PERFECT_FIT_P` so the result stays in (0, 1].
    """
    if df < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df!r}")
    if math.isnan(t):
        raise DomainError("t-statistic is NaN")
    if math.isinf(t):
        return PERFECT_FIT_P
    p = 2.0 * student_t_sf(abs(t), df, tol=tol)
    return min(1.0, max(p, PERFECT_FIT_P))


def infer(x: Sequence[float], y: Sequence[float]) -> InferenceReport:
    """Fit ``y`` on ``x`` and bundle slope, r, R², t and p (df = n - 2)."""
    fit = ols_fit(x, y)
    r = pearson(x, y)
    t = t_statistic(fit)
    df = fit.n - 2
    se = 0.0 if fit.perfect_fit else slope_standard_error(fit)
    return InferenceReport(
        fit=fit,
        pearson_r=r,
        r_squared=r * r,
        t_statistic=t,
        p_value=p_value_two_sided(t, df),
        degrees_of_freedom=df,
        standard_error=se,
    )
