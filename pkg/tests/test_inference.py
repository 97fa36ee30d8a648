"""Distribution kernels and the hypothesis-test layer.

Grids are checked against mpmath (normal) and scipy.stats (chi-square);
scalar anchors were computed with mpmath at 40 digits and are frozen below.
"""

import math

import mpmath
import numpy as np
import pytest
import scipy.stats

from choicestats import (
    ConfidenceInterval,
    IdentificationError,
    NestingError,
    asymptotic_ci,
    bounded_parameter_test,
    build_design,
    chisq_cdf,
    chisq_sf,
    estimate,
    lm_test,
    lm_test_at,
    lr_test,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    t_test,
    wald_test,
    z_for_level,
)

from testtools import assert_close_rel, three_mode_data, three_mode_spec

mpmath.mp.dps = 40

# Φ⁻¹ at a spread of levels, mpmath erfinv, 40 digits, rounded to float64.
QUANTILE_ORACLE = {
    1e-12: -7.034483825301132,
    1e-06: -4.753424308822899,
    0.01: -2.326347874040841,
    0.025: -1.9599639845400543,
    0.05: -1.6448536269514726,
    0.2: -0.8416212335729142,
    0.5: 0.0,
    0.8: 0.8416212335729142,
    0.975: 1.9599639845400543,
    0.999999: 4.753424308822899,
}

PHI_MINUS_1 = 0.15865525393145705
PHI_MINUS_2 = 0.02275013194817921
PHI_MINUS_2_5 = 0.006209665325776135
PHI_3 = 0.9986501019683699


def _phi_oracle(x):
    return float(0.5 * mpmath.erfc(-mpmath.mpf(x) / mpmath.sqrt(2)))


class TestNormalCdf:
    def test_matches_mpmath_including_far_tails(self):
        # erfc keeps the tail relatively accurate; demand that, not just
        # absolute agreement.
        for x in (-37.0, -30.0, -13.61, -8.0, -3.2, -1.0, -0.1, 0.0, 0.5, 2.7, 8.0, 30.0):
            got = normal_cdf(x)
            want = _phi_oracle(x)
            assert got == pytest.approx(want, rel=5e-13), f"x={x}"

    def test_tails_sum_to_one_exactly(self):
        for x in (0.0, 1e-8, 0.3, 1.0, 1.96, 5.5, 12.0, 37.0, 200.0):
            assert normal_cdf(x) + normal_cdf(-x) == 1.0

    def test_monotone(self):
        grid = np.linspace(-10.0, 10.0, 201)
        values = [normal_cdf(x) for x in grid]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            normal_cdf(float("nan"))

    def test_pdf_matches_mpmath(self):
        for x in (-8.0, -1.3, 0.0, 0.5, 4.2):
            want = float(mpmath.exp(-mpmath.mpf(x) ** 2 / 2) / mpmath.sqrt(2 * mpmath.pi))
            assert normal_pdf(x) == pytest.approx(want, rel=1e-14)


class TestNormalQuantile:
    def test_matches_mpmath_oracle(self):
        for p, want in QUANTILE_ORACLE.items():
            got = normal_quantile(p)
            assert got == pytest.approx(want, rel=1e-11, abs=1e-12), f"p={p}"

    def test_round_trip_through_cdf(self):
        for p in (1e-10, 1e-4, 0.025, 0.31, 0.5, 0.77, 0.95, 1 - 1e-6):
            assert normal_cdf(normal_quantile(p)) == pytest.approx(p, rel=1e-9)

    def test_two_sided_critical_values(self):
        assert z_for_level(0.95) == pytest.approx(1.9599639845400543, abs=1e-12)
        assert z_for_level(0.90) == pytest.approx(1.6448536269514726, abs=1e-12)
        # z_for_level(level) is the (1 - (1-level)/2) quantile, nothing else.
        assert z_for_level(0.95) == normal_quantile(0.975)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.7])
    def test_levels_outside_open_interval_rejected(self, p):
        with pytest.raises(ValueError):
            normal_quantile(p)
        with pytest.raises(ValueError):
            z_for_level(p)


class TestChiSquare:
    def test_matches_scipy_grid(self):
        for df in (1, 2, 3, 5, 10, 40):
            for x in (0.01, 0.5, 1.0, 2.0, 3.8415, 8.0, 20.0, 80.0):
                assert chisq_cdf(x, df) == pytest.approx(
                    scipy.stats.chi2.cdf(x, df), rel=1e-12, abs=1e-300
                ), f"cdf df={df} x={x}"
                assert chisq_sf(x, df) == pytest.approx(
                    scipy.stats.chi2.sf(x, df), rel=1e-12, abs=1e-300
                ), f"sf df={df} x={x}"

    def test_far_tail_keeps_relative_precision(self):
        # sf(300, 1) ~ 3e-67; a 1-cdf evaluation would return 0 here.
        assert chisq_sf(300.0, 1) == pytest.approx(
            scipy.stats.chi2.sf(300.0, 1), rel=1e-10
        )
        assert chisq_sf(300.0, 1) > 0.0

    def test_frozen_anchors(self):
        # mpmath: erfc(2) and 1 - erfc(sqrt(3.8415 / 2)).
        assert chisq_sf(8.0, 1) == pytest.approx(0.004677734981047266, rel=1e-12)
        assert chisq_sf(8.0, 1) < 0.01
        assert abs(chisq_cdf(3.8415, 1) - 0.95) < 1e-4
        assert chisq_cdf(3.8415, 1) == pytest.approx(0.9500012279287777, rel=1e-12)

    def test_boundaries_and_complement(self):
        for df in (1, 4, 9):
            assert chisq_cdf(0.0, df) == 0.0
            assert chisq_sf(0.0, df) == 1.0
            for x in (0.7, 5.0, 33.0):
                assert chisq_cdf(x, df) + chisq_sf(x, df) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("bad_x,bad_df", [(-1.0, 1), (2.0, 0), (2.0, 1.5), (float("nan"), 1)])
    def test_invalid_arguments_rejected(self, bad_x, bad_df):
        with pytest.raises(ValueError):
            chisq_cdf(bad_x, bad_df)
        with pytest.raises(ValueError):
            chisq_sf(bad_x, bad_df)


class TestTRatio:
    def test_statistic_and_auto_direction(self):
        res = t_test(1.0, 0.5)
        assert res.statistic == 2.0
        assert res.sidedness == "one_sided_greater"
        assert res.p_value == pytest.approx(PHI_MINUS_2, rel=1e-13)
        assert res.df is None
        assert res.method == "t_ratio"

        res = t_test(-1.0, 0.5)
        assert res.sidedness == "one_sided_less"
        assert res.p_value == pytest.approx(PHI_MINUS_2, rel=1e-13)

    def test_two_sided_is_exactly_twice_one_sided(self):
        for est, se in ((0.3, 0.11), (-2.0, 0.7), (1.4, 1.4), (-0.02, 0.5)):
            one = t_test(est, se, sidedness="auto").p_value
            two = t_test(est, se, sidedness="two_sided").p_value
            assert two == 2.0 * one

    def test_zero_statistic(self):
        res = t_test(0.0, 1.0)
        assert res.statistic == 0.0
        assert res.sidedness == "one_sided_greater"
        assert res.p_value == 0.5

    def test_nonzero_null_value(self):
        res = t_test(2.0, 0.5, h0_value=1.0)
        assert res.statistic == 2.0
        assert "value = 1" in res.h0_description

    def test_declared_direction_honoured_with_sign_conflict_note(self):
        res = t_test(0.3, 0.1, sidedness="less")
        assert res.statistic == pytest.approx(3.0)
        assert res.sidedness == "one_sided_less"
        assert res.p_value == pytest.approx(PHI_3, rel=1e-13)
        assert any("null side" in note for note in res.notes)

        clean = t_test(-0.3, 0.1, sidedness="less")
        assert clean.notes == ()

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            t_test(1.0, 0.0)
        with pytest.raises(ValueError):
            t_test(1.0, -0.5)
        with pytest.raises(ValueError):
            t_test(1.0, 0.5, sidedness="both")


class TestWald:
    def test_squares_the_t_ratio(self):
        res = wald_test(1.0, 0.5)
        assert res.statistic == 4.0
        assert res.df == 1
        assert res.method == "wald"

    def test_agrees_with_two_sided_t(self):
        # Same tail mass through two routes: chi-square(1) upper tail versus
        # doubled normal tail.
        for est, se in ((0.5, 0.3), (-1.9, 0.44), (0.01, 0.2), (3.5, 0.6), (-7.0, 1.1)):
            p_wald = wald_test(est, se).p_value
            p_t = t_test(est, se, sidedness="two_sided").p_value
            assert abs(p_wald - p_t) <= 1e-10 * max(1.0, p_t)

    def test_invalid_se_rejected(self):
        with pytest.raises(ValueError):
            wald_test(1.0, 0.0)


class TestLikelihoodRatio:
    def test_frozen_example(self):
        res = lr_test(-100.0, -104.0, 1)
        assert res.statistic == 8.0
        assert res.p_value == pytest.approx(0.004677734981047266, rel=1e-12)
        assert res.df == 1
        assert res.method == "lr"

    def test_tiny_inversion_clamped_to_zero(self):
        res = lr_test(-100.0 - 1e-9, -100.0, 2)
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_nesting_violation_raises(self):
        with pytest.raises(NestingError):
            lr_test(-100.0, -99.99999, 1)

    @pytest.mark.parametrize("d", [0, -1, 2.5])
    def test_invalid_restriction_count_rejected(self, d):
        with pytest.raises(ValueError):
            lr_test(-100.0, -104.0, d)


class TestLagrangeMultiplier:
    def test_frozen_scalar_example(self):
        # G = 5, I = 25: LM = 25/25 = 1, upper chi-square(1) tail = 2Φ(-1).
        res = lm_test(np.array([5.0]), np.array([[25.0]]), 1)
        assert res.statistic == pytest.approx(1.0, rel=1e-14)
        assert res.p_value == pytest.approx(2.0 * PHI_MINUS_1, rel=1e-12)
        assert res.method == "lm"

    def test_matches_linear_solve_oracle(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((6, 4))
        info = a.T @ a + 0.5 * np.eye(4)
        g = rng.standard_normal(4)
        res = lm_test(g, info, 2)
        want = float(g @ np.linalg.solve(info, g))
        assert_close_rel(res.statistic, want, 1e-10, "lm statistic")

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            lm_test(np.array([1.0, 2.0]), np.eye(3), 1)

    def test_indefinite_information_rejected(self):
        with pytest.raises(IdentificationError):
            lm_test(np.array([1.0]), np.array([[-4.0]]), 1)


class TestLmAtRestrictedEstimates:
    def test_agrees_with_lr_and_wald_when_restriction_is_false(self):
        dataset = three_mode_data(n_persons=1500, obs_per_person=1, seed=31)
        spec = three_mode_spec()

        restricted = estimate(dataset, spec.with_fixed("b_cost", 0.0))
        general = estimate(dataset, spec)
        assert restricted.status == "converged" and general.status == "converged"

        design = build_design(dataset, spec)
        at = restricted.params_dict()
        at["b_cost"] = 0.0
        params = np.array([at[name] for name in design.free_names])

        res_lm = lm_test_at(design, params, 1)
        res_lr = lr_test(general.ll_hat, restricted.ll_hat, 1)
        assert res_lm.df == res_lr.df == 1

        # All three tests see the same strong violation; statistics agree to
        # first order at this sample size.
        assert res_lm.statistic > 10.0
        assert res_lm.statistic == pytest.approx(res_lr.statistic, rel=0.15)

    def test_bhhh_fallback_when_hessian_route_fails(self):
        dataset = three_mode_data(n_persons=200, obs_per_person=1, seed=32)
        spec = three_mode_spec()
        design = build_design(dataset, spec)
        params = design.start_values

        class _BadHessian:
            # -hessian comes back negative definite, forcing the score
            # outer-product route.
            def gradient(self, p):
                return design.gradient(p)

            def hessian(self, p):
                return -design.hessian(p)

            def score(self, p, grouping):
                return design.score(p, grouping=grouping)

        rows = design.score(params, grouping="person")
        want = lm_test(design.gradient(params), rows.T @ rows, 1)
        got = lm_test_at(_BadHessian(), params, 1)
        assert got.statistic == pytest.approx(want.statistic, rel=1e-12)
        assert got.p_value == pytest.approx(want.p_value, rel=1e-12)


class TestAsymptoticCi:
    def test_bounds_formula(self):
        ci = asymptotic_ci(1.2, 0.4, level=0.95)
        z = z_for_level(0.95)
        assert ci.lower == 1.2 - z * 0.4
        assert ci.upper == 1.2 + z * 0.4
        assert ci.level == 0.95
        assert ci.asymmetry_index == 0.0
        assert ci.method == "asymptotic_classical"
        assert ci.width == ci.upper - ci.lower

    def test_degenerate_when_se_is_zero(self):
        ci = asymptotic_ci(3.0, 0.0)
        assert ci.lower == ci.upper == 3.0
        assert ci.width == 0.0

    def test_method_label_passes_through(self):
        ci = asymptotic_ci(0.0, 1.0, method="asymptotic_robust")
        assert ci.method == "asymptotic_robust"

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            asymptotic_ci(0.0, -1.0)
        with pytest.raises(ValueError):
            asymptotic_ci(0.0, 1.0, level=1.0)

    def test_is_frozen_value_object(self):
        ci = asymptotic_ci(0.0, 1.0)
        assert isinstance(ci, ConfidenceInterval)
        with pytest.raises(AttributeError):
            ci.lower = -1.0


class TestBoundedParameter:
    def test_frozen_interior_example(self):
        at_upper, at_lower, p_outside = bounded_parameter_test(0.5, 0.2, 0.0, 1.0)
        assert at_upper.statistic == pytest.approx(-2.5)
        assert at_upper.sidedness == "one_sided_less"
        assert at_upper.p_value == pytest.approx(PHI_MINUS_2_5, rel=1e-13)
        assert at_lower.statistic == pytest.approx(2.5)
        assert at_lower.sidedness == "one_sided_greater"
        assert at_lower.p_value == pytest.approx(PHI_MINUS_2_5, rel=1e-13)
        assert p_outside == pytest.approx(2.0 * PHI_MINUS_2_5, rel=1e-13)

    def test_estimate_outside_interval_is_flagged(self):
        at_upper, at_lower, p_outside = bounded_parameter_test(1.2, 0.1, 0.0, 1.0)
        assert any("null side" in note for note in at_upper.notes)
        assert at_lower.notes == ()
        assert p_outside > 0.5

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            bounded_parameter_test(0.5, 0.2, 1.0, 0.0)
        with pytest.raises(ValueError):
            bounded_parameter_test(0.5, 0.0, 0.0, 1.0)
