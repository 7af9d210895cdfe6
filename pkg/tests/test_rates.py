import math

import numpy as np
import pytest

from growthcast import (
    DomainError,
    RateMethod,
    SmoothingConfig,
    TimeSeries,
    TransformKind,
    ValidationError,
    direct_rates,
    integrate_discrete,
    rate_of_transform,
    refined_rates,
)

from oracles import poly_derivative_over_value


def series(times, values, **kw):
    return TimeSeries(np.asarray(times, float), np.asarray(values, float), **kw)


class TestSmoothingConfig:
    def test_defaults(self):
        cfg = SmoothingConfig()
        assert cfg.window == 7 and cfg.degree == 3

    @pytest.mark.parametrize("window", [2, 4, 1, 0])
    def test_rejects_bad_window(self, window):
        with pytest.raises(ValidationError):
            SmoothingConfig(window=window, degree=1)

    @pytest.mark.parametrize("degree", [0, 5, 7])
    def test_rejects_bad_degree(self, degree):
        with pytest.raises(ValidationError):
            SmoothingConfig(window=5, degree=degree)


class TestDirectRates:
    def test_single_step(self):
        rs = direct_rates(series([0, 1], [100.0, 110.0]))
        assert len(rs) == 1
        assert rs.times[0] == 1.0
        assert rs.rates[0] == pytest.approx(0.1)
        assert rs.sizes[0] == 110.0
        assert rs.method is RateMethod.DIRECT

    def test_constant_series_rates_zero(self):
        rs = direct_rates(series([0, 1, 2], [5.0, 5.0, 5.0]))
        np.testing.assert_array_equal(rs.rates, [0.0, 0.0])

    def test_exponential_unit_steps(self):
        # oracle: per-step rate of exp(r t) at dt=1 is e^r - 1
        t = np.arange(0, 30)
        rs = direct_rates(series(t, np.exp(0.02 * t)))
        expected = math.exp(0.02) - 1.0
        np.testing.assert_allclose(rs.rates, expected, rtol=1e-12)
        assert expected == pytest.approx(0.0202013, abs=1e-7)

    def test_zero_size_is_domain_error(self):
        with pytest.raises(DomainError, match="t=1"):
            direct_rates(series([0, 1, 2], [1.0, 0.0, 2.0]))

    def test_output_has_n_minus_1_points(self):
        rs = direct_rates(series(np.arange(10), np.linspace(1, 2, 10)))
        assert len(rs) == 9

    def test_scale_invariance(self):
        t = np.arange(12, dtype=float)
        values = np.cumsum(np.abs(np.sin(t)) + 0.5) + 3.0
        base = direct_rates(series(t, values))
        doubled = direct_rates(series(t, 2.0 * values))
        np.testing.assert_array_equal(base.rates, doubled.rates)  # exact for k = 2
        scaled = direct_rates(series(t, 1.7 * values))
        np.testing.assert_allclose(scaled.rates, base.rates, rtol=1e-13)

    def test_inverts_through_discrete_integration(self):
        rng = np.random.default_rng(3)
        t = np.cumsum(rng.uniform(0.5, 2.0, size=25))
        v = np.cumprod(1.0 + rng.uniform(-0.05, 0.08, size=25)) * 100.0
        ts = series(t, v)
        back = integrate_discrete(direct_rates(ts), (t[0], v[0]))
        np.testing.assert_allclose(back.values, ts.values, rtol=1e-12)
        np.testing.assert_array_equal(back.times, ts.times)


class TestRefinedRates:
    def test_constant_series_rates_zero(self):
        t = np.arange(15, dtype=float)
        rs = refined_rates(series(t, np.full(15, 4.0)))
        np.testing.assert_allclose(rs.rates, 0.0, atol=1e-14)
        assert rs.method is RateMethod.REFINED
        assert len(rs) == 15  # spans the whole data range

    def test_exact_for_polynomial_data(self):
        # data exactly polynomial of the fitted degree: R = p'(t)/p(t) exactly
        coeffs = [50.0, 2.0, 0.3, 0.01]
        t = np.linspace(0.0, 8.0, 41)
        p = np.polynomial.polynomial.polyval(t, coeffs)
        rs = refined_rates(series(t, p), SmoothingConfig(window=7, degree=3))
        expected = poly_derivative_over_value(coeffs, t)
        np.testing.assert_allclose(rs.rates, expected, rtol=1e-10)

    def test_exponential_bias_bound(self):
        t = np.linspace(0.0, 100.0, 101)
        rs = refined_rates(series(t, np.exp(0.03 * t)), SmoothingConfig(window=7, degree=3))
        assert np.max(np.abs(rs.rates - 0.03)) <= 1e-4

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            refined_rates(series([0, 1, 2], [1.0, 2.0, 3.0]), SmoothingConfig(window=5, degree=2))

    def test_zero_value_is_domain_error(self):
        t = np.arange(9, dtype=float)
        v = np.ones(9)
        v[4] = 0.0
        with pytest.raises(DomainError):
            refined_rates(series(t, v))

    def test_nonuniform_spacing_polynomial(self):
        rng = np.random.default_rng(11)
        t = np.cumsum(rng.uniform(0.3, 1.7, size=30))
        coeffs = [10.0, 1.0, 0.05]
        p = np.polynomial.polynomial.polyval(t, coeffs)
        rs = refined_rates(series(t, p), SmoothingConfig(window=5, degree=2))
        expected = poly_derivative_over_value(coeffs, t)
        np.testing.assert_allclose(rs.rates, expected, rtol=1e-9)


class TestDirectRefinedAgreement:
    def test_both_recover_constant_rate_on_dense_exponential(self):
        r = 0.02
        t = np.linspace(0.0, 0.02, 2001)  # dt = 1e-5
        ts = series(t, np.exp(r * t))
        d = direct_rates(ts)
        f = refined_rates(ts, SmoothingConfig(window=3, degree=1))
        assert np.max(np.abs(d.rates - r)) <= 1e-6 * r + 1e-6
        assert np.max(np.abs(f.rates - r)) <= 1e-6 * r + 1e-6


class TestRateOfTransform:
    def test_log_transform_of_double_exponential(self):
        # S = exp(exp(0.01 t)): F = ln S grows exponentially, so the
        # direct rate of F at unit steps is e^0.01 - 1 everywhere
        t = np.arange(0, 40, dtype=float)
        ts = series(t, np.exp(np.exp(0.01 * t)))
        rs = rate_of_transform(ts, TransformKind.LOG, RateMethod.DIRECT)
        np.testing.assert_allclose(rs.rates, math.exp(0.01) - 1.0, rtol=1e-10)

    def test_constant_series_log_rates_zero(self):
        ts = series([0, 1, 2], [7.0, 7.0, 7.0])
        rs = rate_of_transform(ts, TransformKind.LOG, RateMethod.DIRECT)
        np.testing.assert_array_equal(rs.rates, [0.0, 0.0])

    def test_reciprocal_with_zero_is_domain_error(self):
        ts = series([0, 1, 2], [1.0, 0.0, 3.0])
        with pytest.raises(DomainError):
            rate_of_transform(ts, TransformKind.RECIPROCAL)

    def test_size_field_carries_transformed_values(self):
        t = np.arange(0, 6, dtype=float)
        values = np.exp(np.linspace(1.0, 2.0, 6))
        ts = series(t, values)
        rs = rate_of_transform(ts, TransformKind.LOG, RateMethod.DIRECT)
        np.testing.assert_allclose(rs.sizes, np.log(values)[1:], rtol=1e-15)

    def test_refined_variant_matches_refined_on_transformed(self):
        t = np.linspace(0, 20, 50)
        ts = series(t, np.exp(0.05 * t) + 1.0)
        cfg = SmoothingConfig(window=5, degree=2)
        via_transform = rate_of_transform(ts, TransformKind.LOG, RateMethod.REFINED, cfg)
        from growthcast import transform_series

        direct_path = refined_rates(transform_series(ts, TransformKind.LOG), cfg)
        np.testing.assert_allclose(via_transform.rates, direct_path.rates, rtol=1e-14)
