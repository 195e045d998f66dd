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
Learnable positive definite radial kernels on the unit sphere.

A radial kernel on the sphere only depends on t = <u, v>. The learned kernel
is the truncated series

    k(t) = sum_{m=0}^{M} alpha_m t^m + alpha_{-1} k_odd(t) + alpha_{-2} k_even(t)

with every alpha_m >= 0, where alpha = activation(alpha_raw). Coefficient
vectors are laid out as [alpha_{-2}, alpha_{-1}, alpha_0, ..., alpha_M].

Fixed kernels (polynomial, Gaussian RBF, linear) carry a single learnable
scale instead, activated by softplus so that it stays positive and keeps a
gradient. The scale starts at M+3, the value k(1) of the all-ones learned
series, and fixed modes always score at temperature 1.
"""
from dataclasses import dataclass, field
import enum
import logging

import numpy as np
from scipy import linalg
from scipy.special import expit, softmax

from cray.kcl.errors import InvalidSeries, NonUnitVector

LOGGER = logging.getLogger('cray.kcl.kernelcore')

DEFAULT_M = 10
DEFAULT_EQ_TOLERANCE = 1e-9
DEFAULT_DEGREE = 10
DEFAULT_GAMMA = 1.0
UNIT_NORM_TOLERANCE = 1e-9


class KernelMode(enum.Enum):
    LEARNED = 'learned'
    POLYNOMIAL = 'polynomial'
    RBF = 'rbf'
    LINEAR = 'linear'


class Activation(enum.Enum):
    RELU = 'relu'
    SIGMOID = 'sigmoid'
    SOFTMAX = 'softmax'
    NONE = 'none'


DEFAULT_TEMPERATURES = {
    Activation.RELU: 1.0,
    Activation.SIGMOID: 0.1,
    Activation.SOFTMAX: 0.005,
    Activation.NONE: 1.0,
}


@dataclass
class KernelSeries:
    mode: KernelMode = KernelMode.LEARNED
    M: int = DEFAULT_M
    alpha_raw: np.ndarray = None
    activation: Activation = Activation.RELU
    act_temperature: float = None
    eq_tolerance: float = DEFAULT_EQ_TOLERANCE
    degree: int = DEFAULT_DEGREE
    gamma: float = DEFAULT_GAMMA
    scale_raw: np.ndarray = field(default=None)

    def __post_init__(self):
        self.mode = KernelMode(self.mode)
        self.activation = Activation(self.activation)
        if int(self.M) != self.M or self.M < 0:
            raise InvalidSeries('Truncation order M must be a non-negative integer, got {}'.format(self.M))
        self.M = int(self.M)
        if self.alpha_raw is None:
            # Learned coefficients start at all ones
            self.alpha_raw = np.ones(self.M + 3)
        self.alpha_raw = np.array(self.alpha_raw, dtype=float).reshape(-1)
        if self.alpha_raw.shape[0] != self.M + 3:
            raise InvalidSeries('alpha_raw must have length M+3={}, got {}'.format(
                self.M + 3, self.alpha_raw.shape[0]))
        if self.scale_raw is None:
            self.scale_raw = [inverse_softplus(self.M + 3)]
        self.scale_raw = np.array(self.scale_raw, dtype=float).reshape(1)
        if self.act_temperature is None:
            self.act_temperature = 1.0 if self.is_fixed else DEFAULT_TEMPERATURES[self.activation]
        if not self.act_temperature > 0:
            raise InvalidSeries('act_temperature must be positive')
        if not self.eq_tolerance > 0:
            raise InvalidSeries('eq_tolerance must be positive')
        if int(self.degree) != self.degree or self.degree < 1:
            raise InvalidSeries('Polynomial degree must be a positive integer')
        self.degree = int(self.degree)
        if not self.gamma > 0:
            raise InvalidSeries('RBF gamma must be positive')

    @property
    def is_fixed(self):
        return self.mode is not KernelMode.LEARNED

    def copy(self):
        return KernelSeries(mode=self.mode, M=self.M, alpha_raw=self.alpha_raw.copy(),
                            activation=self.activation, act_temperature=self.act_temperature,
                            eq_tolerance=self.eq_tolerance, degree=self.degree,
                            gamma=self.gamma, scale_raw=self.scale_raw.copy())

    def to_block(self):
        """Key-value form used in experiment configs and checkpoint headers."""
        block = {
            'mode': self.mode.value,
            'M': self.M,
            'activation': self.activation.value,
            'act_temperature': self.act_temperature,
        }
        if self.mode is KernelMode.POLYNOMIAL:
            block['degree'] = self.degree
        elif self.mode is KernelMode.RBF:
            block['gamma'] = self.gamma
        return block

    @classmethod
    def from_block(cls, block):
        return cls(mode=block.get('mode', 'learned'),
                   M=int(block.get('M', DEFAULT_M)),
                   activation=block.get('activation', 'relu'),
                   act_temperature=_optional_float(block.get('act_temperature')),
                   degree=int(block.get('degree', DEFAULT_DEGREE)),
                   gamma=float(block.get('gamma', DEFAULT_GAMMA)))


def _optional_float(value):
    if value is None or value == '':
        return None
    return float(value)


@dataclass
class GramMatrix:
    values: np.ndarray
    point_count: int

    def min_eigenvalue(self):
        return float(linalg.eigvalsh(self.values)[0])

    def is_positive_semidefinite(self, tolerance_per_point=1e-8):
        return self.min_eigenvalue() >= -tolerance_per_point * self.point_count


def activate_coefficients(series):
    """Maps the raw learnables alpha' to the non-negative coefficients alpha."""
    raw = series.alpha_raw
    if series.activation is Activation.RELU:
        return np.maximum(raw, 0.0)
    if series.activation is Activation.SIGMOID:
        return expit(raw)
    if series.activation is Activation.SOFTMAX:
        return softmax(raw)
    return raw.copy()


def activation_vjp(series, upstream):
    """
    Vector-Jacobian product of the coefficient activation: returns
    J^T upstream where J = d alpha / d alpha_raw. upstream may carry leading
    batch axes; the coefficient axis is last.
    """
    upstream = np.asarray(upstream, dtype=float)
    raw = series.alpha_raw
    if series.activation is Activation.RELU:
        # Subgradient 0 at the kink
        return upstream * (raw > 0)
    if series.activation is Activation.SIGMOID:
        s = expit(raw)
        return upstream * s * (1.0 - s)
    if series.activation is Activation.SOFTMAX:
        alpha = softmax(raw)
        # (diag(alpha) - alpha alpha^T) is symmetric
        return alpha * upstream - alpha * np.sum(upstream * alpha, axis=-1, keepdims=True)
    return upstream.copy()


def inverse_softplus(value):
    return float(value + np.log(-np.expm1(-value)))


def fixed_scale(series):
    return float(np.logaddexp(0.0, series.scale_raw[0]))


def _clamp(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise InvalidSeries('Kernel evaluated at a non-finite inner product')
    return np.clip(t, -1.0, 1.0)


def _scalar_or_array(value, t):
    if np.ndim(t) == 0:
        return float(value)
    return value


def indicator_kernels(series, t):
    """Returns (k_odd(t), k_even(t)) evaluated with the series' equality tolerance."""
    at_plus = np.abs(t - 1.0) <= series.eq_tolerance
    at_minus = np.abs(t + 1.0) <= series.eq_tolerance
    k_odd = np.where(at_plus, 1.0, np.where(at_minus, -1.0, 0.0))
    k_even = np.where(at_plus | at_minus, 1.0, 0.0)
    return k_odd, k_even


def series_basis(series, t):
    """
    The kernels the learned coefficients multiply, stacked on a trailing
    axis in coefficient order: [k_even, k_odd, t^0, ..., t^M].
    """
    t = _clamp(t)
    k_odd, k_even = indicator_kernels(series, t)
    powers = np.power.outer(t, np.arange(series.M + 1))
    return np.concatenate([k_even[..., None], k_odd[..., None], powers], axis=-1)


def _fixed_base(series, t):
    """Unscaled fixed kernel and its derivative with respect to t."""
    if series.mode is KernelMode.POLYNOMIAL:
        p = series.degree
        return t ** p, p * t ** (p - 1)
    if series.mode is KernelMode.RBF:
        # ||u - v||^2 = 2 - 2t on unit vectors
        value = np.exp(-2.0 * series.gamma * (1.0 - t))
        return value, 2.0 * series.gamma * value
    return t, np.ones_like(t)


def kernel_eval(series, t):
    t_clamped = _clamp(t)
    if series.is_fixed:
        base, _ = _fixed_base(series, t_clamped)
        return _scalar_or_array(fixed_scale(series) * base, t)
    alpha = activate_coefficients(series)
    return _scalar_or_array(series_basis(series, t_clamped) @ alpha, t)


def kernel_derivative(series, t):
    """dk/dt. The indicator kernels are piecewise constant and contribute nothing."""
    t_clamped = _clamp(t)
    if series.is_fixed:
        _, derivative = _fixed_base(series, t_clamped)
        return _scalar_or_array(fixed_scale(series) * derivative, t)
    alpha = activate_coefficients(series)
    m = np.arange(1, series.M + 1)
    if series.M == 0:
        return _scalar_or_array(np.zeros_like(t_clamped), t)
    powers = np.power.outer(t_clamped, m - 1)
    return _scalar_or_array(powers @ (m * alpha[3:]), t)


def kernel_coeff_gradient(series, t):
    """
    dk/d alpha_raw for each t, shape (..., M+3). In fixed modes alpha_raw
    is not used and the gradient is identically zero.
    """
    t_clamped = _clamp(t)
    if series.is_fixed:
        return np.zeros(np.shape(t_clamped) + (series.M + 3,))
    return activation_vjp(series, series_basis(series, t_clamped))


def kernel_scale_gradient(series, t):
    """dk/d scale_raw for fixed modes; zero in learned mode."""
    t_clamped = _clamp(t)
    if not series.is_fixed:
        return _scalar_or_array(np.zeros_like(t_clamped), t)
    base, _ = _fixed_base(series, t_clamped)
    slope = expit(series.scale_raw[0])
    return _scalar_or_array(base * slope, t)


def coefficient_vjp(series, t, upstream):
    """
    Sum over all entries of upstream * dk(t)/d alpha_raw, without building
    the per-entry Jacobian. Used by the classification layer backward pass.
    """
    if series.is_fixed:
        return np.zeros(series.M + 3)
    basis = series_basis(series, t).reshape(-1, series.M + 3)
    d_alpha = basis.T @ np.asarray(upstream, dtype=float).reshape(-1)
    return activation_vjp(series, d_alpha)


def scale_vjp(series, t, upstream):
    if not series.is_fixed:
        return np.zeros(1)
    return np.array([np.sum(np.asarray(upstream) * kernel_scale_gradient(series, t))])


def gram_matrix(series, points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    norms = np.linalg.norm(points, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOLERANCE):
        raise NonUnitVector('Gram matrix points must be unit-norm within {}'.format(UNIT_NORM_TOLERANCE))
    n = points.shape[0]
    rows, cols = np.triu_indices(n)
    inner = np.einsum('ij,ij->i', points[rows], points[cols])
    values = np.zeros((n, n))
    values[rows, cols] = kernel_eval(series, inner)
    values[cols, rows] = values[rows, cols]
    LOGGER.debug('Built %sx%s Gram matrix for %s kernel', n, n, series.mode.value)
    return GramMatrix(values=values, point_count=n)
