"""
Tests for Priestley-Chao smoothing.
"""

import unittest

import numpy as np

from bandsel.errors import ValidationError
from bandsel.kernels import get_kernel
from bandsel.smoother import (
    SmootherBank,
    hat_matrix,
    hat_row_sq_norms,
    is_power_of_two,
    make_plan,
    smooth,
    smooth_direct,
    smooth_fft,
    trace_UL,
    trace_ULLt,
)
from bandsel.trend import benchmark_trend, bump_weight, make_design, uniform_weight


class TestSmootherPlan(unittest.TestCase):
    """Test cases for plan construction."""

    def setUp(self):
        """Set up test fixtures."""
        self.kernel = get_kernel('biweight')

    def test_profile(self):
        plan = make_plan(512, 0.1, self.kernel)
        self.assertEqual(plan.reach, 25)
        self.assertAlmostEqual(plan.profile[0], 1.875 / 51.2, places=15)
        self.assertTrue(np.all(plan.profile >= 0.0))

    def test_rejects_bad_bandwidth(self):
        for h in (0.0, -0.1, 0.5, 0.7):
            with self.assertRaises(ValidationError):
                make_plan(512, h, self.kernel)

    def test_rejects_small_n(self):
        with self.assertRaises(ValidationError):
            make_plan(3, 0.1, self.kernel)

    def test_circular_weights_are_symmetric(self):
        plan = make_plan(64, 0.2, self.kernel)
        w = plan.circular_weights
        np.testing.assert_array_equal(w[1:], w[1:][::-1])
        self.assertEqual(w[0], plan.profile[0])

    def test_power_of_two(self):
        self.assertTrue(is_power_of_two(4096))
        self.assertFalse(is_power_of_two(4095))
        self.assertFalse(is_power_of_two(0))


class TestSmoothing(unittest.TestCase):
    """Test cases for the direct and FFT smoothers."""

    def setUp(self):
        """Set up test fixtures."""
        self.kernel = get_kernel('biweight')
        self.rng = np.random.default_rng(20240501)

    def test_fft_matches_direct(self):
        for _ in range(50):
            n = int(self.rng.integers(64, 8193))
            h = float(self.rng.uniform(0.01, 0.45))
            plan = make_plan(n, h, self.kernel)
            y = self.rng.standard_normal(n)
            np.testing.assert_allclose(smooth_fft(plan, y), smooth_direct(plan, y), rtol=0, atol=1e-10)

    def test_impulse_response(self):
        plan = make_plan(128, 0.2, self.kernel)
        impulse = np.zeros(128)
        impulse[0] = 1.0
        np.testing.assert_array_equal(smooth_direct(plan, impulse), plan.circular_weights)
        np.testing.assert_allclose(smooth_fft(plan, impulse), plan.circular_weights, atol=1e-14)

    def test_linearity(self):
        plan = make_plan(256, 0.15, self.kernel)
        y1 = self.rng.standard_normal(256)
        y2 = self.rng.standard_normal(256)
        np.testing.assert_allclose(smooth(plan, 2.5 * y1 - y2), 2.5 * smooth(plan, y1) - smooth(plan, y2),
                                   atol=1e-12)

    def test_shift_equivariance(self):
        plan = make_plan(256, 0.15, self.kernel)
        y = self.rng.standard_normal(256)
        np.testing.assert_allclose(smooth(plan, np.roll(y, 17)), np.roll(smooth(plan, y), 17), atol=1e-12)

    def test_hat_matrix(self):
        plan = make_plan(16, 0.4, self.kernel)
        L = hat_matrix(plan)
        y = self.rng.standard_normal(16)
        np.testing.assert_allclose(L @ y, smooth_direct(plan, y), atol=1e-14)
        np.testing.assert_array_equal(L, L.T)
        np.testing.assert_allclose(hat_row_sq_norms(plan), (L ** 2).sum(axis=1), atol=1e-15)

    def test_non_periodic_hat_matrix(self):
        plan = make_plan(40, 0.3, self.kernel, periodic=False)
        L = hat_matrix(plan)
        y = self.rng.standard_normal(40)
        np.testing.assert_allclose(L @ y, smooth(plan, y), atol=1e-14)
        np.testing.assert_allclose(hat_row_sq_norms(plan), (L ** 2).sum(axis=1), atol=1e-15)
        # Rows near the boundary lose weight instead of being renormalised
        self.assertLess(L[0].sum(), L[20].sum())

    def test_fft_requires_periodic_plan(self):
        plan = make_plan(64, 0.2, self.kernel, periodic=False)
        with self.assertRaises(ValidationError):
            smooth_fft(plan, np.zeros(64))

    def test_rejects_wrong_length(self):
        plan = make_plan(64, 0.2, self.kernel)
        with self.assertRaises(ValidationError):
            smooth(plan, np.zeros(63))

    def test_bias_follows_curvature(self):
        h = 0.05
        plan = make_plan(4096, h, self.kernel)
        t = benchmark_trend()
        design = make_design(4096)
        r = t.values(design)
        predicted = 0.5 * h * h * self.kernel.moments.second_moment * t.r2(design.points)
        error = np.max(np.abs(smooth(plan, r) - r - predicted))
        scale = h * h * np.max(np.abs(t.r2(design.points))) * self.kernel.moments.second_moment
        self.assertLess(error, 0.1 * scale)


class TestTraces(unittest.TestCase):
    """Test cases for the smoother traces."""

    def setUp(self):
        """Set up test fixtures."""
        self.kernel = get_kernel('biweight')

    def test_trace_UL_uniform(self):
        self.assertAlmostEqual(trace_UL(make_plan(512, 0.1, self.kernel), uniform_weight()), 18.75, places=10)
        self.assertAlmostEqual(trace_UL(make_plan(512, 0.25, self.kernel), uniform_weight()), 7.5, places=10)

    def test_trace_ULLt_approximates_kernel_norm(self):
        value = trace_ULLt(make_plan(512, 0.12, self.kernel), uniform_weight())
        self.assertAlmostEqual(value / ((10.0 / 7.0) / 0.12), 1.0, delta=0.02)

    def test_traces_with_bump_weight(self):
        plan = make_plan(512, 0.1, self.kernel, periodic=False)
        L = hat_matrix(plan)
        u = bump_weight().values(make_design(512))
        self.assertAlmostEqual(trace_UL(plan, bump_weight()), float(np.trace(np.diag(u) @ L)), places=10)
        self.assertAlmostEqual(trace_ULLt(plan, bump_weight()), float(np.trace(np.diag(u) @ L @ L.T)),
                               places=10)


class TestSmootherBank(unittest.TestCase):
    """Test cases for batched smoothing over a grid."""

    def setUp(self):
        """Set up test fixtures."""
        self.kernel = get_kernel('biweight')
        self.grid = [0.05, 0.1, 0.2, 0.4]
        self.rng = np.random.default_rng(7)

    def test_fft_bank_matches_single_plans(self):
        bank = SmootherBank.for_grid(512, self.grid, self.kernel)
        self.assertTrue(bank.use_fft)
        self.assertEqual(len(bank), 4)
        y = self.rng.standard_normal(512)
        fits = bank.apply(y)
        self.assertEqual(fits.shape, (4, 512))
        for row, plan in zip(fits, bank.plans):
            np.testing.assert_allclose(row, smooth_direct(plan, y), atol=1e-12)

    def test_direct_bank_for_other_sizes(self):
        bank = SmootherBank.for_grid(500, self.grid, self.kernel)
        self.assertFalse(bank.use_fft)
        y = self.rng.standard_normal(500)
        np.testing.assert_array_equal(bank.apply(y)[2], smooth_direct(bank.plans[2], y))
        np.testing.assert_array_equal(bank.bandwidths, self.grid)

    def test_bank_rejects_mixed_plans(self):
        with self.assertRaises(ValidationError):
            SmootherBank([make_plan(512, 0.1, self.kernel), make_plan(256, 0.1, self.kernel)])
        with self.assertRaises(ValidationError):
            SmootherBank([])


if __name__ == '__main__':
    unittest.main()
