"""Thresholding and scaling contracts."""

import numpy as np
import pytest

from adashrink.orthobasis import coeff_set
from adashrink.shrinkage import (
    adaptive_scale,
    fixed_scale,
    hard_threshold,
    lst_fit,
    lst_path,
    soft_threshold,
    ssp_scale,
    universal_fit,
)
from oracles import kth_plus_one_largest_abs, penalized_ls_grid


class TestSoftThreshold:
    def test_basic_values(self):
        np.testing.assert_allclose(
            soft_threshold(np.array([3.0, -1.0, 0.5]), 1.0), [2.0, 0.0, 0.0]
        )

    def test_zero_threshold_is_identity(self):
        z = np.array([3.0, -1.0, 0.5])
        np.testing.assert_array_equal(soft_threshold(z, 0.0), z)

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            soft_threshold(np.ones(3), -0.1)

    def test_matches_penalized_ls_grid_search(self):
        """Each coordinate minimizes (z - b)^2 + 2*theta*|b|; inputs sit on
        the 1e-4 search grid so the argmin is exact."""
        for z, theta in [(3.0, 1.0), (-1.0, 1.0), (0.5, 1.0), (2.4462, 0.73)]:
            expected = penalized_ls_grid(z, theta)
            got = float(soft_threshold(np.array([z]), theta)[0])
            assert abs(got - expected) <= 1e-6

    def test_grid_oracle_random_sweep(self):
        rng = np.random.default_rng(0)
        z = np.round(rng.uniform(-4.5, 4.5, size=40), 4)
        theta = round(float(rng.uniform(0.1, 2.0)), 4)
        got = soft_threshold(z, theta)
        for zj, gj in zip(z, got):
            assert abs(gj - penalized_ls_grid(zj, theta)) <= 1e-6

    def test_composition_adds_thresholds(self):
        rng = np.random.default_rng(1)
        z = rng.standard_normal(50) * 3
        a, b = 0.4, 0.9
        lhs = soft_threshold(soft_threshold(z, a), b)
        rhs = soft_threshold(z, a + b)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestHardThreshold:
    def test_basic_values(self):
        np.testing.assert_allclose(
            hard_threshold(np.array([3.0, -1.0, 0.5]), 1.0), [3.0, 0.0, 0.0]
        )

    def test_zero_threshold_keeps_nonzero(self):
        z = np.array([3.0, -1.0, 0.5, 0.0])
        np.testing.assert_array_equal(hard_threshold(z, 0.0), z)

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            hard_threshold(np.ones(3), -1.0)

    def test_adaptive_scaling_approaches_hard_thresholding(self):
        """The gap |scaled_j - z_j| = t^2/|z_j| vanishes as |z_j|/t grows."""
        gaps = []
        for ratio in (2.0, 10.0, 100.0):
            z = np.array([ratio, 1.0, -0.5])  # t_1 = 1
            cs = coeff_set(z)
            fit = lst_fit(cs, 1)
            scaled = adaptive_scale(fit, cs).scaled
            hard = hard_threshold(z, fit.threshold)
            assert abs(scaled[0] - z[0]) == pytest.approx(
                fit.threshold**2 / abs(z[0]), abs=1e-12
            )
            gaps.append(abs(scaled[0] - hard[0]))
        assert gaps[0] > gaps[1] > gaps[2]


class TestLstFit:
    def test_small_example(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        fit = lst_fit(cs, 1)
        assert fit.threshold == 3.0
        np.testing.assert_array_equal(fit.active, [0])
        np.testing.assert_allclose(fit.b, [2.0, 0.0, 0.0])

    def test_k0_is_zero_fit(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        fit = lst_fit(cs, 0)
        np.testing.assert_array_equal(fit.b, np.zeros(3))
        assert fit.active.size == 0

    def test_full_step_drops_only_smallest(self):
        rng = np.random.default_rng(2)
        z = rng.standard_normal(16)
        cs = coeff_set(z)
        fit = lst_fit(cs, 15)
        smallest = int(np.argmin(np.abs(z)))
        assert fit.threshold == kth_plus_one_largest_abs(z, 15)
        assert smallest not in set(fit.active.tolist())
        assert np.count_nonzero(fit.b) == 15

    def test_threshold_matches_sorting_oracle(self):
        rng = np.random.default_rng(3)
        z = rng.standard_normal(20)
        cs = coeff_set(z)
        for k in range(20):
            assert lst_fit(cs, k).threshold == kth_plus_one_largest_abs(z, k)

    @pytest.mark.parametrize("k", [-1, 3, 10])
    def test_out_of_range_k(self, k):
        with pytest.raises(ValueError):
            lst_fit(coeff_set(np.array([5.0, 3.0, 1.0])), k)


class TestLstPath:
    def test_thresholds_non_increasing(self):
        rng = np.random.default_rng(4)
        cs = coeff_set(rng.standard_normal(32))
        path = lst_path(cs, 31)
        thresholds = [fit.threshold for fit in path]
        assert all(a >= b for a, b in zip(thresholds, thresholds[1:]))

    def test_path_matches_independent_fits(self):
        rng = np.random.default_rng(5)
        cs = coeff_set(rng.standard_normal(32))
        for k, fit in enumerate(lst_path(cs, 31)):
            single = lst_fit(cs, k)
            assert fit.threshold == single.threshold
            np.testing.assert_array_equal(fit.active, single.active)
            np.testing.assert_array_equal(fit.b, single.b)

    def test_experiment_scale_path(self):
        rng = np.random.default_rng(6)
        cs = coeff_set(rng.standard_normal(500))
        path = lst_path(cs, 50)
        assert len(path) == 51

    def test_kmax_out_of_range(self):
        with pytest.raises(ValueError):
            lst_path(coeff_set(np.ones(4)), 4)

    def test_monotone_shrinkage_along_path(self):
        """A coordinate active at step k keeps growing in magnitude with k."""
        rng = np.random.default_rng(7)
        cs = coeff_set(rng.standard_normal(24))
        path = lst_path(cs, 23)
        for fit, nxt in zip(path, path[1:]):
            for j in fit.active:
                assert abs(fit.b[j]) <= abs(nxt.b[j]) + 1e-15


class TestAdaptiveScale:
    def test_small_example(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        sf = adaptive_scale(lst_fit(cs, 1), cs)
        assert sf.alphas[0] == pytest.approx(1.6, abs=1e-15)
        assert sf.scaled[0] == pytest.approx(3.2, abs=1e-15)
        assert sf.scaled[0] == pytest.approx(5.0 - 9.0 / 5.0, abs=1e-15)

    def test_k0_scales_nothing(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        sf = adaptive_scale(lst_fit(cs, 0), cs)
        np.testing.assert_array_equal(sf.scaled, np.zeros(3))
        np.testing.assert_array_equal(sf.alphas, np.ones(3))

    def test_alphas_exceed_one_on_active_set(self):
        rng = np.random.default_rng(8)
        cs = coeff_set(rng.standard_normal(64))
        for k in range(64):
            sf = adaptive_scale(lst_fit(cs, k), cs)
            if k < 63:  # t_k > 0 almost surely
                assert np.all(sf.alphas[sf.base.active] > 1.0)

    def test_closed_form_identity(self):
        """scaled_j * z_j = z_j^2 - t_k^2 on the active set, exactly."""
        rng = np.random.default_rng(9)
        cs = coeff_set(rng.standard_normal(64) * 3)
        for k in (1, 5, 20, 63):
            sf = adaptive_scale(lst_fit(cs, k), cs)
            act = sf.base.active
            lhs = sf.scaled[act] * cs.z[act]
            rhs = cs.z[act] ** 2 - sf.base.threshold**2
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_mismatched_pair_rejected(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        other = coeff_set(np.array([0.1, 0.2, 9.0]))
        fit = lst_fit(cs, 1)
        with pytest.raises(ValueError):
            adaptive_scale(fit, other)


class TestSspScale:
    def test_small_example(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        sf = ssp_scale(lst_fit(cs, 1), cs, 1.0)
        assert sf.alphas[0] == pytest.approx(2.75, abs=1e-15)
        assert sf.variant == "ssp"

    def test_unshrunk_spike_keeps_alpha_one(self):
        """With t_1 = 0 the fit is already unshrunk and alpha = 1."""
        cs = coeff_set(np.array([4.0, 0.0, 0.0]))
        sf = ssp_scale(lst_fit(cs, 1), cs, 0.0)
        assert sf.alphas[0] == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(sf.scaled, [4.0, 0.0, 0.0])

    def test_alpha_exceeds_one_with_positive_variance(self):
        """b_j z_j = b_j^2 + t|b_j| >= b_j^2, so alpha > 1 whenever t, sigma > 0."""
        rng = np.random.default_rng(10)
        cs = coeff_set(rng.standard_normal(64))
        for k in (1, 5, 30):
            sf = ssp_scale(lst_fit(cs, k), cs, 0.5)
            assert sf.alphas[sf.base.active][0] > 1.0

    def test_k0_returns_unscaled_none_variant(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        sf = ssp_scale(lst_fit(cs, 0), cs, 1.0)
        assert sf.variant == "none"
        np.testing.assert_array_equal(sf.alphas, np.ones(3))

    def test_paper_literal_formula_differs(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        fit = lst_fit(cs, 1)
        consistent = ssp_scale(fit, cs, 1.0).alphas[0]
        literal = ssp_scale(fit, cs, 1.0, formula="paper-literal").alphas[0]
        # literal: (sqrt(3)*10/1 + 1) / 4
        assert literal == pytest.approx((np.sqrt(3.0) * 10.0 + 1.0) / 4.0, rel=1e-12)
        assert literal != pytest.approx(consistent)

    def test_fixed_scale(self):
        cs = coeff_set(np.array([5.0, 3.0, 1.0]))
        sf = fixed_scale(lst_fit(cs, 2), 1.5)
        np.testing.assert_allclose(sf.alphas, [1.5, 1.5, 1.0])
        np.testing.assert_allclose(sf.scaled, 1.5 * sf.base.b)


class TestUniversalFit:
    def test_threshold_value_n1024(self):
        cs = coeff_set(np.zeros(1024))
        fit = universal_fit(cs, 1.0)
        assert fit.threshold == pytest.approx(np.sqrt(2.0 * np.log(1024.0)), abs=1e-12)
        assert round(fit.threshold, 4) == 3.7233

    def test_all_below_threshold_gives_zero_fit(self):
        cs = coeff_set(np.full(16, 0.1))
        fit = universal_fit(cs, 1.0)
        assert fit.k == 0
        np.testing.assert_array_equal(fit.b, np.zeros(16))

    def test_pure_noise_mostly_kills_everything(self):
        """P[k = 0] for N(0, I) noise at n = 1024 stays above 0.8."""
        rng = np.random.default_rng(11)
        zero_count = 0
        reps = 1000
        for _ in range(reps):
            cs = coeff_set(rng.standard_normal(1024))
            zero_count += universal_fit(cs, 1.0).k == 0
        assert zero_count / reps >= 0.8

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            universal_fit(coeff_set(np.ones(8)), 0.0)
        with pytest.raises(ValueError):
            universal_fit(coeff_set(np.ones(1)), 1.0)


class TestScalingInvariants:
    def test_scaling_never_changes_active_set(self):
        rng = np.random.default_rng(12)
        cs = coeff_set(rng.standard_normal(32))
        for k in range(32):
            fit = lst_fit(cs, k)
            for sf in (
                adaptive_scale(fit, cs),
                ssp_scale(fit, cs, 1.0),
                fixed_scale(fit, 2.0),
            ):
                np.testing.assert_array_equal(sf.base.active, fit.active)
                np.testing.assert_array_equal(
                    sf.scaled != 0.0, fit.b != 0.0
                )

    def test_scaled_fits_at_large_n(self):
        """Active-coordinate factors along the whole path at n = 64."""
        rng = np.random.default_rng(13)
        cs = coeff_set(rng.standard_normal(64) * 2)
        for k in range(0, 63, 7):
            sf = adaptive_scale(lst_fit(cs, k), cs)
            inactive = np.setdiff1d(np.arange(64), sf.base.active)
            np.testing.assert_array_equal(sf.alphas[inactive], np.ones(inactive.size))
