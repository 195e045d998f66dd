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
"""
Property suites run by the check command and reused by the unit tests:
finite-difference gradient checks, positive semidefiniteness of Gram
matrices and their closure under sums and products, the pointwise limits of
the monomial kernels, and the Gram counterexample for unconstrained
coefficients.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from cray.kcl import backbone
from cray.kcl import classifier
from cray.kcl import kernelcore
from cray.kcl import losses
from cray.kcl.network import Network
from cray.kcl.rng import make_rng

LOGGER = logging.getLogger('cray.kcl.suites')

FD_STEP = 1e-5
GRADIENT_RTOL = 1e-4
GRADIENT_ATOL = 1e-7
KERNEL_RTOL = 1e-5
PSD_TOLERANCE_PER_POINT = 1e-8
LIMIT_TOLERANCE = 1e-10
COUNTEREXAMPLE_BOUND = -0.5
KERNEL_DRAWS = 100

# Suite identifiers used as the extra entropy of the 'suite' stream
_GRADIENT, _KERNEL, _PSD, _CLOSURE = range(4)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    draws: int
    detail: str = ''

    def to_dict(self):
        return {
            'property': self.name,
            'passed': self.passed,
            'worst': self.worst,
            'tolerance': self.tolerance,
            'draws': self.draws,
            'detail': self.detail,
        }


def central_difference(func, x, h=FD_STEP):
    """Central finite-difference gradient of the scalar function func at x."""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    flat_grad = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = func(x.copy())
        flat[i] = original - h
        minus = func(x.copy())
        flat[i] = original
        flat_grad[i] = (plus - minus) / (2.0 * h)
    return grad


def mismatch(analytic, numeric, rtol=GRADIENT_RTOL, atol=GRADIENT_ATOL):
    """
    Largest ratio |a - n| / (atol + rtol * max(|a|, |n|)) over all entries.
    Values at most 1 are within tolerance.
    """
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    if analytic.size == 0:
        return 0.0
    scale = atol + rtol * np.maximum(np.abs(analytic), np.abs(numeric))
    return float(np.max(np.abs(analytic - numeric) / scale))


def _random_unit_vectors(rng, count, dim):
    points = rng.standard_normal((count, dim))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def _random_alpha(rng, activation, size):
    if activation is kernelcore.Activation.RELU:
        # Stay clear of the ReLU kink at zero
        return rng.choice([-1.0, 1.0], size=size) * rng.uniform(0.1, 1.5, size=size)
    return rng.standard_normal(size)


def random_series(rng, activations=('relu', 'sigmoid', 'softmax'), fixed_share=0.0):
    activation = kernelcore.Activation(rng.choice(activations))
    if rng.uniform() < fixed_share:
        mode = kernelcore.KernelMode(rng.choice(['polynomial', 'rbf', 'linear']))
        return kernelcore.KernelSeries(mode=mode, activation=activation,
                                       degree=int(rng.integers(1, 11)),
                                       gamma=float(rng.uniform(0.25, 2.0)),
                                       scale_raw=[rng.uniform(0.2, 2.0)])
    M = int(rng.integers(0, 13))
    return kernelcore.KernelSeries(M=M, activation=activation,
                                   alpha_raw=_random_alpha(rng, activation, M + 3))


def random_network_case(rng):
    """A small random network with a batch of inputs and a hard or soft target."""
    class_count = int(rng.choice([2, 5, 10]))
    feature_dim = int(rng.choice([3, 8]))
    if rng.uniform() < 0.8:
        head = classifier.ClassifierParams.init_kernelized(class_count, feature_dim, rng,
                                                           random_series(rng, fixed_share=0.25))
    else:
        head = classifier.ClassifierParams.init_linear(class_count, feature_dim, rng)
        head.bias = rng.standard_normal(class_count)
    config = None
    params = None
    input_dim = feature_dim
    if rng.uniform() < 0.5:
        input_dim = int(rng.integers(2, 5))
        config = backbone.MlpConfig(layer_sizes=[input_dim, int(rng.integers(2, 7)), feature_dim],
                                    hidden_activation=rng.choice(['relu', 'tanh']))
        params = backbone.init_params(config, rng)
    network = Network(head, config, params)
    batch = int(rng.integers(1, 5))
    inputs = rng.standard_normal((batch, input_dim))
    if rng.uniform() < 0.3:
        target = losses.TeacherTargets(rng.standard_normal((batch, class_count)) * 3.0,
                                       float(rng.choice([1.0, 4.0, 20.0])))
    else:
        target = rng.integers(0, class_count, size=batch)
    return network, inputs, target


def _network_case_mismatch(network, inputs, target):
    _, grads = network.forward_backward(inputs, target)
    worst = 0.0
    for key, value in network.parameters().items():
        def loss_at(candidate, key=key):
            shifted = network.copy()
            shifted.set_parameters({key: candidate})
            return shifted.forward_backward(inputs, target)[0]
        worst = max(worst, mismatch(grads[key], central_difference(loss_at, value)))
    features = network.features(inputs)
    _, layer_grads = classifier.forward_backward_batch(network.head, features, target)

    def loss_of_features(shifted_features):
        return classifier.forward_backward_batch(network.head, shifted_features, target)[0]
    return max(worst, mismatch(layer_grads.d_features, central_difference(loss_of_features, features)))


def gradient_suite(seed, draws):
    """Every parameter block and the feature gradient against central differences."""
    worst = 0.0
    failures = []
    for draw in range(draws):
        network, inputs, target = random_network_case(make_rng(seed, 'suite', _GRADIENT, draw))
        ratio = _network_case_mismatch(network, inputs, target)
        if ratio > 1.0:
            failures.append(draw)
        worst = max(worst, ratio)
    LOGGER.info("Gradient suite: worst tolerance ratio %.3g over %s draws", worst, draws)
    return PropertyResult('end_to_end_gradients', not failures, worst, 1.0, draws,
                          'rtol={} atol={}; failing draws {}'.format(GRADIENT_RTOL, GRADIENT_ATOL, failures))


def kernel_gradient_suite(seed, draws=KERNEL_DRAWS):
    """kernel_derivative, kernel_coeff_gradient and kernel_scale_gradient against differences of kernel_eval."""
    worst_t = 0.0
    worst_coeff = 0.0
    for draw in range(draws):
        rng = make_rng(seed, 'suite', _KERNEL, draw)
        series = random_series(rng, activations=('relu', 'sigmoid', 'softmax', 'none'), fixed_share=0.25)
        t = float(rng.uniform(-1.0 + 1e-3, 1.0 - 1e-3))
        numeric_t = central_difference(lambda x: kernelcore.kernel_eval(series, float(x[0])), [t])
        worst_t = max(worst_t, mismatch([kernelcore.kernel_derivative(series, t)], numeric_t,
                                        KERNEL_RTOL, GRADIENT_ATOL))
        if series.is_fixed:
            def value_at(scale_raw):
                shifted = series.copy()
                shifted.scale_raw = scale_raw
                return kernelcore.kernel_eval(shifted, t)
            analytic = kernelcore.kernel_scale_gradient(series, t)
            numeric = central_difference(value_at, series.scale_raw)
        else:
            def value_at(alpha_raw):
                shifted = series.copy()
                shifted.alpha_raw = alpha_raw
                return kernelcore.kernel_eval(shifted, t)
            analytic = kernelcore.kernel_coeff_gradient(series, t)
            numeric = central_difference(value_at, series.alpha_raw)
        worst_coeff = max(worst_coeff, mismatch(analytic, numeric, KERNEL_RTOL, GRADIENT_ATOL))
    return [
        PropertyResult('kernel_derivative', worst_t <= 1.0, worst_t, 1.0, draws,
                       'rtol={}; |t| <= 1 - 1e-3'.format(KERNEL_RTOL)),
        PropertyResult('kernel_coefficient_gradient', worst_coeff <= 1.0, worst_coeff, 1.0, draws,
                       'rtol={}'.format(KERNEL_RTOL)),
    ]


def _random_points(rng, max_points=20):
    count = int(rng.integers(1, max_points + 1))
    points = _random_unit_vectors(rng, count, int(rng.choice([2, 3, 5])))
    if rng.uniform() < 0.3:
        # A repeated point and an antipodal pair put t = +1 and t = -1 off the diagonal
        points = np.vstack([points, points[:1], -points[:1]])
    return points


def _scaled_min_eigenvalue(gram):
    """Minimum eigenvalue divided by the tolerance floor -1e-8 * N (<= 1 passes)."""
    return -gram.min_eigenvalue() / (PSD_TOLERANCE_PER_POINT * gram.point_count)


def psd_suite(seed, draws):
    worst = -math.inf
    most_negative = math.inf
    for draw in range(draws):
        rng = make_rng(seed, 'suite', _PSD, draw)
        gram = kernelcore.gram_matrix(random_series(rng, fixed_share=0.25), _random_points(rng))
        worst = max(worst, _scaled_min_eigenvalue(gram))
        most_negative = min(most_negative, gram.min_eigenvalue())
    LOGGER.info("PSD suite: smallest eigenvalue %.3g over %s draws", most_negative, draws)
    return PropertyResult('gram_positive_semidefinite', worst <= 1.0, most_negative,
                          -PSD_TOLERANCE_PER_POINT, draws, 'min eigenvalue >= -1e-8 * N')


def closure_suite(seed, draws):
    """Non-negative combinations and pointwise products of PSD kernels stay PSD."""
    worst_sum = -math.inf
    worst_product = -math.inf
    for draw in range(draws):
        rng = make_rng(seed, 'suite', _CLOSURE, draw)
        points = _random_points(rng)
        first = kernelcore.gram_matrix(random_series(rng), points)
        second = kernelcore.gram_matrix(random_series(rng), points)
        weights = rng.uniform(0.0, 2.0, size=2)
        combined = kernelcore.GramMatrix(weights[0] * first.values + weights[1] * second.values,
                                         first.point_count)
        product = kernelcore.GramMatrix(first.values * second.values, first.point_count)
        worst_sum = max(worst_sum, _scaled_min_eigenvalue(combined))
        worst_product = max(worst_product, _scaled_min_eigenvalue(product))
    return [
        PropertyResult('closure_nonnegative_sum', worst_sum <= 1.0, worst_sum, 1.0, draws,
                       'scaled by 1e-8 * N'),
        PropertyResult('closure_pointwise_product', worst_product <= 1.0, worst_product, 1.0, draws,
                       'scaled by 1e-8 * N'),
    ]


def limit_gap(t, order):
    """Distance of t^order from its pointwise limit (k_even for even orders, k_odd for odd)."""
    series = kernelcore.KernelSeries(M=0)
    k_odd, k_even = kernelcore.indicator_kernels(series, t)
    limit = k_even if order % 2 == 0 else k_odd
    return abs(t ** order - float(limit))


def limit_order(t, tolerance=LIMIT_TOLERANCE):
    """First order at which |t|^m drops to tolerance, for 0 < |t| < 1."""
    return int(math.ceil(math.log(tolerance) / math.log(abs(t))))


def series_limit_suite(order):
    worst = 0.0
    notes = []
    for t in (-1.0, 0.0, 1.0):
        for m in (order, order + 1):
            worst = max(worst, limit_gap(t, m))
    for t in (-0.9, 0.9):
        gaps = [limit_gap(t, m) for m in range(order, order + 2)]
        # Away from +-1 the gap is exactly |t|^m and shrinks with m
        if any(abs(gap - abs(t) ** m) > 1e-15 for gap, m in zip(gaps, range(order, order + 2))):
            worst = max(worst, max(gaps))
        if gaps[1] > gaps[0]:
            worst = max(worst, gaps[1])
        m_star = max(order, limit_order(t))
        worst = max(worst, limit_gap(t, m_star), limit_gap(t, m_star + 1))
        notes.append('t={}: gap {:.3g} at order {}, 1e-10 reached at order {}'.format(t, gaps[0], order, m_star))
    return PropertyResult('monomial_pointwise_limits', worst <= LIMIT_TOLERANCE, worst, LIMIT_TOLERANCE,
                          5, '; '.join(notes))


def counterexample_gram():
    """Gram of the unconstrained series alpha_1 = -1 on two orthogonal unit vectors."""
    series = kernelcore.KernelSeries(M=1, activation=kernelcore.Activation.NONE,
                                     alpha_raw=[0.0, 0.0, 0.0, -1.0])
    return kernelcore.gram_matrix(series, np.eye(3)[:2])


def counterexample_suite():
    gram = counterexample_gram()
    eigenvalue = gram.min_eigenvalue()
    return PropertyResult('unconstrained_series_not_psd', eigenvalue <= COUNTEREXAMPLE_BOUND, eigenvalue,
                          COUNTEREXAMPLE_BOUND, 1, 'activation none, alpha_1 = -1, points e1 e2')


def run_suites(seed, gradient_draws=50, psd_draws=100, series_terms=50):
    results = [gradient_suite(seed, gradient_draws)]
    results.extend(kernel_gradient_suite(seed))
    results.append(psd_suite(seed, psd_draws))
    results.extend(closure_suite(seed, psd_draws))
    results.append(series_limit_suite(series_terms))
    results.append(counterexample_suite())
    for result in results:
        log = LOGGER.info if result.passed else LOGGER.error
        log("%s: %s (worst %s, tolerance %s)", result.name, 'pass' if result.passed else 'FAIL',
            result.worst, result.tolerance)
    return results
