import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from agi_growth.errors import DataError, DomainError
from agi_growth.production import (
    Mode,
    ModelParams,
    agi_index,
    compute_index,
    effective_labor,
    elasticity_pointwise,
    elasticity_regression,
    output,
    synthesize_panel,
    tfp_residual,
)
from agi_growth.timeseries import AlignedPanel

positive = st.floats(1e-3, 1e3)
alphas = st.floats(0.05, 0.95)
LITERAL = dict(inversion_mode=Mode.PAPER_LITERAL, residual_mode=Mode.PAPER_LITERAL)


class TestParams:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_alpha_bounds(self, alpha):
        with pytest.raises(DomainError):
            ModelParams(alpha)

    def test_modes_from_strings(self):
        p = ModelParams(0.3, "paper_literal", "consistent")
        assert p.inversion_mode is Mode.PAPER_LITERAL


class TestOutput:
    def test_sqrt(self):
        assert output(1, 4, 1, 1, ModelParams(0.5)) == 2.0

    @pytest.mark.parametrize("alpha", [0.1, 0.33, 0.5, 0.9])
    def test_identity(self, alpha):
        assert output(1, 1, 1, 1, ModelParams(alpha)) == 1.0

    def test_oracle_value(self):
        # 40-digit mpmath evaluation of 2 * 8**(1/3) * (3*1.5)**(2/3)
        got = output(2, 8, 3, 1.5, ModelParams(1 / 3))
        assert got == pytest.approx(10.902723556992837953, rel=1e-14)

    @pytest.mark.parametrize("arg", ["a", "k", "l", "agi"])
    def test_domain_error_names_argument(self, arg):
        kwargs = dict(a=1.0, k=1.0, l=1.0, agi=1.0)
        kwargs[arg] = 0.0
        with pytest.raises(DomainError, match=arg):
            output(params=ModelParams(0.3), **kwargs)

    @given(positive, positive, positive, positive, alphas, st.floats(1e-2, 1e2))
    def test_homogeneity(self, a, k, l, g, alpha, lam):  # noqa: E741
        p = ModelParams(alpha)
        assert output(a, lam * k, lam * l, g, p) == pytest.approx(lam * output(a, k, l, g, p), rel=1e-12)


class TestAgiIndex:
    def test_consistent(self):
        assert agi_index(2, 1, 1, 1, ModelParams(0.5)) == pytest.approx(4.0, rel=1e-15)

    def test_paper_literal(self):
        # 2 / (1 * 4**0.5 * 1)**2 = 0.5
        assert agi_index(2, 1, 4, 1, ModelParams(0.5, **LITERAL)) == pytest.approx(0.5, rel=1e-15)

    def test_modes_agree_at_unit_point(self):
        for mode in Mode:
            assert agi_index(1, 1, 1, 1, ModelParams(0.4, inversion_mode=mode)) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError, match="y"):
            agi_index(-1, 1, 1, 1, ModelParams(0.5))

    @given(positive, positive, positive, positive, alphas)
    def test_round_trip(self, a, k, l, g, alpha):  # noqa: E741
        p = ModelParams(alpha)
        assert agi_index(output(a, k, l, g, p), a, k, l, p) == pytest.approx(g, rel=1e-10)

    @given(positive, positive, positive, positive, alphas)
    def test_monotone(self, y, a, k, l, alpha):  # noqa: E741
        p = ModelParams(alpha)
        base = agi_index(y, a, k, l, p)
        assert agi_index(y * 1.01, a, k, l, p) > base
        assert agi_index(y, a * 1.01, k, l, p) < base
        assert agi_index(y, a, k * 1.01, l, p) < base
        assert agi_index(y, a, k, l * 1.01, p) < base


class TestTfpResidual:
    def test_consistent(self):
        assert tfp_residual(2, 4, 1, 1, ModelParams(0.5)) == 1.0

    def test_paper_literal(self):
        # (4**0.5 * 1 * 1**0.5) / 2 = 1.0
        assert tfp_residual(2, 4, 1, 1, ModelParams(0.5, **LITERAL)) == 1.0

    def test_paper_literal_differs_generally(self):
        p_lit = ModelParams(0.5, **LITERAL)
        # (9**0.5 * 2 * 4**0.5) / 3 = 4
        assert tfp_residual(3, 9, 2, 4, p_lit) == pytest.approx(4.0, rel=1e-15)
        assert tfp_residual(3, 9, 2, 4, ModelParams(0.5)) == pytest.approx(3 / (3 * math.sqrt(8)), rel=1e-15)

    @given(positive, positive, positive, positive, alphas)
    def test_round_trip(self, a, k, l, g, alpha):  # noqa: E741
        p = ModelParams(alpha)
        assert tfp_residual(output(a, k, l, g, p), k, l, g, p) == pytest.approx(a, rel=1e-10)


class TestEffectiveLabor:
    @pytest.mark.parametrize("l, g", [(100.0, 0.3), (100.0, 0.0), (50.0, 1.0)])
    def test_examples(self, l, g):  # noqa: E741
        assert effective_labor(l, g) == l

    def test_grid_exact(self):
        for l in (1.0, 50.0, 1e6):  # noqa: E741
            for g in (0.0, 0.3, 1.0, 7.0):
                assert effective_labor(l, g) == l

    @given(st.floats(1e-3, 1e6), st.floats(-10, 10))
    def test_identity_to_rounding(self, l, g):  # noqa: E741
        assert effective_labor(l, g) == pytest.approx(l, rel=1e-14 * max(1.0, abs(g)))

    def test_non_positive_labor(self):
        with pytest.raises(DomainError):
            effective_labor(0.0, 0.5)


class TestElasticity:
    def test_pointwise(self):
        assert elasticity_pointwise([2.0], [4.0]) == [0.5]
        assert elasticity_pointwise([3.0], [0.0]) == [None]
        assert elasticity_pointwise([1.0, 2.0], [2.0, 4.0]) == [0.5, 0.5]

    def test_pointwise_mismatch(self):
        with pytest.raises(DataError):
            elasticity_pointwise([1.0], [1.0, 2.0])

    def _panel(self, k, y):
        n = len(k)
        return AlignedPanel(years=range(2000, 2000 + n), y=y, k=k, l=[1.0] * n, a=[1.0] * n)

    def test_recovers_exponent(self):
        # capital grows about 2% a year with varying increments so log-growth has variance
        growth = [0.02, 0.015, 0.025, 0.018, 0.022, 0.03, 0.01]
        k = [100.0]
        for g in growth:
            k.append(k[-1] * (1 + g))
        est = elasticity_regression(self._panel(k, [v**0.3 for v in k]))
        assert est.regression_estimate == pytest.approx(0.3, abs=1e-9)
        assert len(est.pointwise) == len(growth)
        for _, ratio in est.pointwise:
            assert ratio == pytest.approx(0.3, rel=0.02)

    def test_constant_capital(self):
        with pytest.raises(DataError, match="zero variance"):
            elasticity_regression(self._panel([5.0] * 5, [1.0, 2.0, 3.0, 4.0, 5.0]))

    def test_constant_output(self):
        est = elasticity_regression(self._panel([1.0, 2.0, 5.0, 6.0, 9.0], [3.0] * 5))
        assert est.regression_estimate == 0.0

    def test_too_short(self):
        with pytest.raises(DataError, match="too short"):
            elasticity_regression(self._panel([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]))


class TestComputeIndex:
    def test_baseline_ones(self):
        p = ModelParams(0.4)
        a, k, l = [1.5, 2.0, 2.5], [10.0, 20.0, 30.0], [5.0, 6.0, 7.0]  # noqa: E741
        y = [ai * ki**0.4 * li**0.6 for ai, ki, li in zip(a, k, l)]
        res = compute_index(AlignedPanel(years=[2000, 2001, 2002], y=y, k=k, l=l, a=a), p)
        assert res.agi == pytest.approx([1.0, 1.0, 1.0], rel=1e-13)
        assert res.tfp_residual == pytest.approx(a, rel=1e-13)
        assert res.effective_labor == tuple(l)
        assert res.source_window == (2000, 2002)

    @given(st.lists(st.tuples(positive, positive, positive, positive), min_size=3, max_size=10), alphas)
    def test_recovers_synthetic_path(self, rows, alpha):
        p = ModelParams(alpha)
        a, k, l, g = (list(col) for col in zip(*rows))  # noqa: E741
        panel = synthesize_panel(range(1990, 1990 + len(rows)), a, k, l, g, p)
        res = compute_index(panel, p)
        for got, want in zip(res.agi, g):
            assert abs(got - want) / want <= 1e-10
        for got, want in zip(res.tfp_residual, a):
            assert abs(got - want) / want <= 1e-10

    def test_zero_labor_rejected(self):
        with pytest.raises(DataError, match="non-positive value in l at 2001"):
            AlignedPanel(years=[2000, 2001, 2002], y=[1, 1, 1], k=[1, 1, 1], l=[1, 0, 1], a=[1, 1, 1])

    def test_error_carries_year(self):
        # bypass panel validation to exercise the defensive check
        panel = AlignedPanel(years=[2000, 2001, 2002], y=[1, 1, 1], k=[1, 1, 1], l=[1, 1, 1], a=[1, 1, 1])
        object.__setattr__(panel, "l", (1.0, 0.0, 1.0))
        with pytest.raises(DomainError, match="year 2001"):
            compute_index(panel, ModelParams(0.3))


class TestSynthesize:
    def test_constant(self):
        panel = synthesize_panel([1, 2, 3], [1] * 3, [1] * 3, [1] * 3, [1] * 3, ModelParams(0.3))
        assert panel.y == (1.0, 1.0, 1.0)

    def test_log_growth(self):
        p = ModelParams(0.5)
        g = [1.125**i for i in range(6)]
        panel = synthesize_panel(range(6), [2.0] * 6, [3.0] * 6, [4.0] * 6, g, p)
        ln_y = [math.log(v) for v in panel.y]
        for prev, cur in zip(ln_y, ln_y[1:]):
            assert cur - prev == pytest.approx(0.5 * math.log(1.125), abs=1e-13)

    def test_mismatch(self):
        with pytest.raises(DataError):
            synthesize_panel([1, 2, 3], [1] * 2, [1] * 3, [1] * 3, [1] * 3, ModelParams(0.3))

    def test_single_year(self):
        with pytest.raises(DataError, match="sample too short"):
            synthesize_panel([2000], [1], [1], [1], [1], ModelParams(0.3))
