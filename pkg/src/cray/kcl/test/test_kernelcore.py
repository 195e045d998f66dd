#
# MIT License
#
# (C) Copyright 2026 Hewlett Packard Enterprise Development LP
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#
import numpy as np

from cray.kcl import kernelcore
from cray.kcl.errors import InvalidSeries, NonUnitVector
from cray.kcl.kernelcore import Activation, KernelMode, KernelSeries
from cray.kcl.rng import make_rng
from cray.kcl.suites import central_difference
from cray.kcl.test import BaseTestCase


def one_hot_series(M, index, activation=Activation.NONE, value=1.0):
    """alpha_raw with a single non-zero entry; index counts from alpha_-2."""
    alpha_raw = np.zeros(M + 3)
    alpha_raw[index] = value
    return KernelSeries(M=M, alpha_raw=alpha_raw, activation=activation)


class TestActivateCoefficients(BaseTestCase):

    def test_relu_identity_on_positive(self):
        series = KernelSeries()
        self.assertArrayClose(kernelcore.activate_coefficients(series), np.ones(13))

    def test_softmax_uniform(self):
        series = KernelSeries(alpha_raw=np.zeros(13), activation=Activation.SOFTMAX)
        self.assertArrayClose(kernelcore.activate_coefficients(series), np.full(13, 1.0 / 13))

    def test_relu_clips_negative(self):
        series = KernelSeries(M=1, alpha_raw=[-1.0, 2.0, -1.0, 2.0])
        self.assertArrayClose(kernelcore.activate_coefficients(series), [0.0, 2.0, 0.0, 2.0])

    def test_default_temperatures(self):
        self.assertEqual(KernelSeries(activation='sigmoid').act_temperature, 0.1)
        self.assertEqual(KernelSeries(activation='softmax').act_temperature, 0.005)
        self.assertEqual(KernelSeries(activation='relu').act_temperature, 1.0)

    def test_fixed_modes_score_at_unit_temperature(self):
        for activation in ('relu', 'sigmoid', 'softmax', 'none'):
            self.assertEqual(KernelSeries(mode='rbf', activation=activation).act_temperature, 1.0)
        self.assertEqual(KernelSeries(mode='linear', act_temperature=0.5).act_temperature, 0.5)

    def test_fixed_scale_starts_at_learned_peak(self):
        for M in (0, 4, 10):
            learned = kernelcore.kernel_eval(KernelSeries(M=M), 1.0)
            self.assertAlmostEqual(kernelcore.fixed_scale(KernelSeries(mode='rbf', M=M)), learned, places=9)

    def test_wrong_length_rejected(self):
        self.assertRaises(InvalidSeries, KernelSeries, M=10, alpha_raw=np.ones(12))


class TestKernelEval(BaseTestCase):

    def test_all_ones_at_one(self):
        self.assertAlmostEqual(kernelcore.kernel_eval(KernelSeries(), 1.0), 13.0)

    def test_all_ones_geometric_sum(self):
        self.assertAlmostEqual(kernelcore.kernel_eval(KernelSeries(), 0.5), 1.9990234375, places=12)

    def test_pure_linear(self):
        self.assertAlmostEqual(kernelcore.kernel_eval(one_hot_series(10, 3), 0.37), 0.37)

    def test_rbf_at_one(self):
        series = KernelSeries(mode=KernelMode.RBF, gamma=0.5)
        self.assertAlmostEqual(kernelcore.kernel_eval(series, 1.0), 1.0)

    def test_all_zero_coefficients(self):
        series = KernelSeries(alpha_raw=np.zeros(13), activation=Activation.NONE)
        for t in (-1.0, -0.3, 0.0, 0.8, 1.0):
            self.assertEqual(kernelcore.kernel_eval(series, t), 0.0)

    def test_overshoot_is_clamped(self):
        series = KernelSeries()
        self.assertEqual(kernelcore.kernel_eval(series, 1.0 + 1e-15), kernelcore.kernel_eval(series, 1.0))

    def test_indicators_at_minus_one(self):
        self.assertEqual(kernelcore.kernel_eval(one_hot_series(2, 1), -1.0), -1.0)
        self.assertEqual(kernelcore.kernel_eval(one_hot_series(2, 0), -1.0), 1.0)
        self.assertEqual(kernelcore.kernel_eval(one_hot_series(2, 0), 0.5), 0.0)

    def test_non_finite_rejected(self):
        self.assertRaises(InvalidSeries, kernelcore.kernel_eval, KernelSeries(), float('nan'))

    def test_vectorized_matches_scalar(self):
        series = KernelSeries(alpha_raw=make_rng(3, 'suite').standard_normal(13), activation=Activation.SIGMOID)
        ts = np.linspace(-1.0, 1.0, 9)
        self.assertArrayClose(kernelcore.kernel_eval(series, ts), [kernelcore.kernel_eval(series, t) for t in ts])


class TestKernelDerivatives(BaseTestCase):

    def test_square_derivative(self):
        self.assertAlmostEqual(kernelcore.kernel_derivative(one_hot_series(10, 4), 0.5), 1.0)

    def test_indicators_carry_no_derivative(self):
        alpha_raw = np.zeros(13)
        alpha_raw[:2] = 1.0
        series = KernelSeries(alpha_raw=alpha_raw, activation=Activation.NONE)
        for t in (-1.0, 0.2, 1.0):
            self.assertEqual(kernelcore.kernel_derivative(series, t), 0.0)

    def test_derivative_matches_finite_difference(self):
        series = KernelSeries()
        numeric = central_difference(lambda x: kernelcore.kernel_eval(series, float(x[0])), [0.3])
        self.assertGradientClose([kernelcore.kernel_derivative(series, 0.3)], numeric, rtol=1e-6)

    def test_coeff_gradient_all_ones_at_one(self):
        self.assertArrayClose(kernelcore.kernel_coeff_gradient(KernelSeries(), 1.0), np.ones(13))

    def test_coeff_gradient_relu_dead_zone(self):
        alpha_raw = np.ones(13)
        alpha_raw[3] = -0.5
        gradient = kernelcore.kernel_coeff_gradient(KernelSeries(alpha_raw=alpha_raw), 0.7)
        self.assertEqual(gradient[3], 0.0)

    def test_coeff_gradient_sigmoid_finite_difference(self):
        series = KernelSeries(alpha_raw=make_rng(5, 'suite').standard_normal(13), activation=Activation.SIGMOID)

        def value_at(alpha_raw):
            shifted = series.copy()
            shifted.alpha_raw = alpha_raw
            return kernelcore.kernel_eval(shifted, 0.4)
        numeric = central_difference(value_at, series.alpha_raw)
        self.assertGradientClose(kernelcore.kernel_coeff_gradient(series, 0.4), numeric, rtol=1e-5)

    def test_coeff_gradient_softmax_finite_difference(self):
        series = KernelSeries(alpha_raw=make_rng(6, 'suite').standard_normal(13), activation=Activation.SOFTMAX)

        def value_at(alpha_raw):
            shifted = series.copy()
            shifted.alpha_raw = alpha_raw
            return kernelcore.kernel_eval(shifted, -0.6)
        numeric = central_difference(value_at, series.alpha_raw)
        self.assertGradientClose(kernelcore.kernel_coeff_gradient(series, -0.6), numeric, rtol=1e-5)

    def test_fixed_modes_have_no_coefficient_gradient(self):
        for mode in (KernelMode.RBF, KernelMode.POLYNOMIAL, KernelMode.LINEAR):
            series = KernelSeries(mode=mode)
            self.assertArrayClose(kernelcore.kernel_coeff_gradient(series, 0.2), np.zeros(13))
            self.assertNotEqual(kernelcore.kernel_scale_gradient(series, 0.2), 0.0)

    def test_fixed_scale_never_dies(self):
        for raw in (-0.74, -5.0, 0.0, 3.0):
            series = KernelSeries(mode='rbf', gamma=2.0, scale_raw=[raw])
            self.assertGreater(kernelcore.fixed_scale(series), 0.0)
            self.assertGreater(kernelcore.kernel_scale_gradient(series, 0.3), 0.0)
            numeric = central_difference(
                lambda x: kernelcore.kernel_eval(KernelSeries(mode='rbf', gamma=2.0, scale_raw=x), 0.3), [raw])
            self.assertGradientClose([kernelcore.kernel_scale_gradient(series, 0.3)], numeric, rtol=1e-6)

    def test_fixed_derivative_finite_difference(self):
        for series in (KernelSeries(mode='rbf', gamma=2.0, scale_raw=[0.7]),
                       KernelSeries(mode='polynomial', degree=10),
                       KernelSeries(mode='linear', scale_raw=[1.5])):
            numeric = central_difference(lambda x: kernelcore.kernel_eval(series, float(x[0])), [0.45])
            self.assertGradientClose([kernelcore.kernel_derivative(series, 0.45)], numeric, rtol=1e-6)


class TestGramMatrix(BaseTestCase):

    def test_single_point(self):
        gram = kernelcore.gram_matrix(KernelSeries(), [[0.0, 0.0, 1.0]])
        self.assertArrayClose(gram.values, [[13.0]])

    def test_random_points_are_psd(self):
        rng = make_rng(11, 'suite')
        points = rng.standard_normal((5, 3))
        points /= np.linalg.norm(points, axis=1, keepdims=True)
        series = KernelSeries(alpha_raw=np.abs(rng.standard_normal(13)))
        gram = kernelcore.gram_matrix(series, points)
        self.assertArrayClose(gram.values, gram.values.T, rtol=0, atol=1e-12)
        self.assertGreaterEqual(gram.min_eigenvalue(), -1e-8 * 5)
        self.assertTrue(gram.is_positive_semidefinite())

    def test_unconstrained_counterexample(self):
        series = KernelSeries(M=1, activation=Activation.NONE, alpha_raw=[0.0, 0.0, 0.0, -1.0])
        gram = kernelcore.gram_matrix(series, np.eye(3)[:2])
        self.assertArrayClose(gram.values, [[-1.0, 0.0], [0.0, -1.0]])
        self.assertAlmostEqual(gram.min_eigenvalue(), -1.0)
        self.assertFalse(gram.is_positive_semidefinite())

    def test_non_unit_points_rejected(self):
        self.assertRaises(NonUnitVector, kernelcore.gram_matrix, KernelSeries(), [[1.0, 1.0, 0.0]])


class TestSeriesBlock(BaseTestCase):

    def test_block_round_trip(self):
        series = KernelSeries(mode='rbf', M=4, activation='sigmoid', gamma=0.5)
        restored = KernelSeries.from_block({k: str(v) for k, v in series.to_block().items()})
        self.assertEqual(restored.to_block(), series.to_block())


if __name__ == '__main__':
    import unittest
    unittest.main()
