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
The kernelized classification layer and the standard linear softmax layer.

Kernelized mode scores class j as k(<w_j/|w_j|, f/|f|>) with the layer's
learnable kernel series and no bias. Raw weights are kept unnormalized and
normalized on every forward pass so that gradients flow through the
normalization. The linear baseline scores w_j . f + b_j on raw vectors.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from cray.kcl import kernelcore
from cray.kcl import losses
from cray.kcl.errors import DegenerateVector, InvalidTarget, ShapeMismatch

LOGGER = logging.getLogger('cray.kcl.classifier')
NORM_FLOOR = 1e-12


@dataclass
class ClassifierParams:
    weights: np.ndarray
    series: kernelcore.KernelSeries = None
    use_bias: bool = False
    bias: np.ndarray = None

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=float)
        if self.weights.ndim != 2 or self.weights.shape[0] < 2 or self.weights.shape[1] < 2:
            raise ShapeMismatch('Classifier weights must be L x d with L >= 2 and d >= 2, got {}'.format(
                self.weights.shape))
        if self.use_bias:
            if self.bias is None:
                self.bias = np.zeros(self.class_count)
            self.bias = np.array(self.bias, dtype=float).reshape(-1)
            if self.bias.shape[0] != self.class_count:
                raise ShapeMismatch('Bias length {} does not match {} classes'.format(
                    self.bias.shape[0], self.class_count))
        else:
            if self.bias is not None:
                raise ShapeMismatch('The kernelized classification layer does not use a bias')
            if self.series is None:
                self.series = kernelcore.KernelSeries()

    @property
    def kernelized(self):
        return not self.use_bias

    @property
    def class_count(self):
        return self.weights.shape[0]

    @property
    def feature_dim(self):
        return self.weights.shape[1]

    def default_temperature(self):
        return self.series.act_temperature if self.kernelized else 1.0

    def copy(self):
        return ClassifierParams(weights=self.weights.copy(),
                                series=self.series.copy() if self.series is not None else None,
                                use_bias=self.use_bias,
                                bias=self.bias.copy() if self.bias is not None else None)

    @classmethod
    def init_kernelized(cls, class_count, feature_dim, rng, series=None):
        """Isotropic standard Gaussian weights; the forward normalization makes their scale irrelevant."""
        return cls(weights=rng.standard_normal((class_count, feature_dim)),
                   series=series if series is not None else kernelcore.KernelSeries())

    @classmethod
    def init_linear(cls, class_count, feature_dim, rng):
        return cls(weights=rng.standard_normal((class_count, feature_dim)) / np.sqrt(feature_dim),
                   use_bias=True)


@dataclass
class LayerGradients:
    d_weights: np.ndarray
    d_alpha_raw: np.ndarray
    d_features: np.ndarray
    d_scale_raw: np.ndarray = field(default_factory=lambda: np.zeros(1))
    d_bias: np.ndarray = None


def _norms(v):
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norms <= NORM_FLOOR):
        raise DegenerateVector('Cannot normalize a vector with norm <= {}'.format(NORM_FLOOR))
    return norms


def normalize(v):
    """L2-normalizes v along its last axis."""
    v = np.asarray(v, dtype=float)
    return v / _norms(v)


def normalize_backward(v, upstream):
    """Jacobian-vector product of v -> v/|v|: removes the radial component and rescales."""
    v = np.asarray(v, dtype=float)
    norms = _norms(v)
    v_hat = v / norms
    upstream = np.asarray(upstream, dtype=float)
    radial = np.sum(upstream * v_hat, axis=-1, keepdims=True)
    return (upstream - radial * v_hat) / norms


def _check_features(params, features):
    features = np.asarray(features, dtype=float)
    if features.shape[-1] != params.feature_dim:
        raise ShapeMismatch('Feature dimension {} does not match classifier dimension {}'.format(
            features.shape[-1], params.feature_dim))
    return features


def _forward(params, features):
    """Returns (raw scores (B, L), cache) for a batch of raw feature vectors."""
    if params.kernelized:
        f_hat = normalize(features)
        w_hat = normalize(params.weights)
        t = np.clip(f_hat @ w_hat.T, -1.0, 1.0)
        return kernelcore.kernel_eval(params.series, t), (f_hat, w_hat, t)
    return features @ params.weights.T + params.bias, None


def raw_scores(params, features):
    """Kernel values (kernelized) or affine scores (linear), before any temperature."""
    features = np.atleast_2d(_check_features(params, features))
    scores, _ = _forward(params, features)
    return scores


def logits(params, f):
    f = _check_features(params, f)
    scores = raw_scores(params, f) / params.default_temperature()
    return scores[0] if f.ndim == 1 else scores


def predict(params, f):
    """Argmax of the logits; ties go to the lowest class index."""
    scores = logits(params, f)
    return int(np.argmax(scores)) if np.ndim(scores) == 1 else np.argmax(scores, axis=1)


def _loss_and_d_raw(params, raw, target, loss_temperature):
    if isinstance(target, losses.TeacherTargets):
        temperature = loss_temperature if loss_temperature is not None else target.temperature
        teacher = losses.TeacherTargets(np.atleast_2d(target.logits), temperature)
        if teacher.logits.shape != raw.shape:
            raise InvalidTarget('Teacher logits {} do not match student scores {}'.format(
                teacher.logits.shape, raw.shape))
        return losses.soft_xent(raw, losses.soften(teacher), temperature)
    target = np.asarray(target)
    if target.ndim == 2:
        temperature = loss_temperature if loss_temperature is not None else 1.0
        return losses.soft_xent(raw, target, temperature)
    temperature = loss_temperature if loss_temperature is not None else params.default_temperature()
    loss, d_logits = losses.softmax_xent(raw / temperature, target)
    return loss, d_logits / temperature


def _backward(params, features, cache, d_raw):
    if not params.kernelized:
        return LayerGradients(d_weights=d_raw.T @ features,
                              d_alpha_raw=np.zeros(0),
                              d_features=d_raw @ params.weights,
                              d_bias=np.sum(d_raw, axis=0))
    f_hat, w_hat, t = cache
    series = params.series
    d_t = d_raw * kernelcore.kernel_derivative(series, t)
    return LayerGradients(d_weights=normalize_backward(params.weights, d_t.T @ f_hat),
                          d_alpha_raw=kernelcore.coefficient_vjp(series, t, d_raw),
                          d_features=normalize_backward(features, d_t @ w_hat),
                          d_scale_raw=kernelcore.scale_vjp(series, t, d_raw))


def forward_backward_batch(params, features, target, loss_temperature=None):
    """
    Mean loss and gradients over a mini-batch.

    :param features: raw (pre-normalization) feature vectors, B x d
    :param target: integer labels (B,), a B x L teacher distribution, or
        TeacherTargets holding B x L teacher logits
    :param loss_temperature: divisor applied to the scores before the softmax;
        defaults to the series' act_temperature for labels, and to the teacher
        temperature for teacher targets
    :rtype: (float, LayerGradients)
    """
    features = np.atleast_2d(_check_features(params, features))
    raw, cache = _forward(params, features)
    loss, d_raw = _loss_and_d_raw(params, raw, target, loss_temperature)
    return loss, _backward(params, features, cache, np.atleast_2d(d_raw))


def forward_backward(params, f, target, loss_temperature=None):
    """Single-example loss and gradients; d_features is a vector of length d."""
    f = _check_features(params, f)
    if f.ndim != 1:
        raise ShapeMismatch('forward_backward takes a single feature vector; use forward_backward_batch')
    if isinstance(target, losses.TeacherTargets):
        batch_target = losses.TeacherTargets(np.atleast_2d(target.logits), target.temperature)
    elif np.ndim(target) == 1:
        batch_target = np.atleast_2d(np.asarray(target, dtype=float))
    else:
        batch_target = np.array([target])
    loss, grads = forward_backward_batch(params, f[None, :], batch_target, loss_temperature)
    grads.d_features = grads.d_features[0]
    return loss, grads
