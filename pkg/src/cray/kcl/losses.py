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
Scalar loss heads shared by the linear softmax layer and the kernelized
layer: softmax cross-entropy, cross-entropy against temperature-softened
teacher logits, and the L2 coefficient penalty.

Every head accepts a single logit vector (L,) or a batch (B, L). Batched
losses are means over the batch and gradients are scaled accordingly.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax, softmax

from cray.kcl.errors import InvalidTarget

DISTRIBUTION_TOLERANCE = 1e-6


@dataclass
class TeacherTargets:
    logits: np.ndarray
    temperature: float

    def __post_init__(self):
        self.logits = np.asarray(self.logits, dtype=float)
        if not np.all(np.isfinite(self.logits)):
            raise InvalidTarget('Teacher logits must be finite')
        if not self.temperature > 0:
            raise InvalidTarget('Distillation temperature must be positive, got {}'.format(self.temperature))


def _as_batch(logits):
    logits = np.asarray(logits, dtype=float)
    return np.atleast_2d(logits), logits.ndim == 1


def _check_labels(labels, class_count):
    labels = np.atleast_1d(np.asarray(labels))
    if not np.issubdtype(labels.dtype, np.integer):
        if np.any(labels != np.round(labels)):
            raise InvalidTarget('Labels must be integers')
        labels = labels.astype(int)
    if np.any(labels < 0) or np.any(labels >= class_count):
        raise InvalidTarget('Labels must lie in [0, {})'.format(class_count))
    return labels


def softmax_xent(logits, label):
    """
    Returns (loss, d_logits) for -log softmax(logits)[label]. scipy's
    log_softmax subtracts the row maximum, so large logits do not overflow.
    """
    batch, single = _as_batch(logits)
    labels = _check_labels(label, batch.shape[1])
    if labels.shape[0] != batch.shape[0]:
        raise InvalidTarget('Got {} labels for {} logit rows'.format(labels.shape[0], batch.shape[0]))
    rows = np.arange(batch.shape[0])
    log_p = log_softmax(batch, axis=1)
    loss = -np.mean(log_p[rows, labels])
    d_logits = np.exp(log_p)
    d_logits[rows, labels] -= 1.0
    d_logits /= batch.shape[0]
    return float(loss), (d_logits[0] if single else d_logits)


def soften(teacher):
    """Temperature softmax of the teacher logits."""
    return softmax(teacher.logits / teacher.temperature, axis=-1)


def check_distribution(distribution):
    distribution = np.asarray(distribution, dtype=float)
    if np.any(distribution < 0) or np.any(
            np.abs(np.sum(distribution, axis=-1) - 1.0) > DISTRIBUTION_TOLERANCE):
        raise InvalidTarget('Teacher distribution must be non-negative and sum to 1')
    return distribution


def soft_xent(student_logits, distribution, temperature):
    """
    Cross-entropy of softmax(student_logits / T) against an already softened
    target distribution. Returns (loss, d_student_logits).
    """
    batch, single = _as_batch(student_logits)
    target = np.atleast_2d(check_distribution(distribution))
    if target.shape != batch.shape:
        raise InvalidTarget('Teacher distribution shape {} does not match student logits {}'.format(
            target.shape, batch.shape))
    log_p = log_softmax(batch / temperature, axis=1)
    loss = -np.sum(target * log_p) / batch.shape[0]
    d_logits = (np.exp(log_p) - target) / (temperature * batch.shape[0])
    return float(loss), (d_logits[0] if single else d_logits)


def distill_xent(student_logits, teacher):
    student_logits = np.asarray(student_logits, dtype=float)
    if student_logits.shape != teacher.logits.shape:
        raise InvalidTarget('Student logits {} and teacher logits {} differ in shape'.format(
            student_logits.shape, teacher.logits.shape))
    return soft_xent(student_logits, soften(teacher), teacher.temperature)


def l2_penalty(alpha_raw, decay):
    """Returns (decay * ||alpha_raw||^2 / 2, decay * alpha_raw)."""
    alpha_raw = np.asarray(alpha_raw, dtype=float)
    return float(0.5 * decay * np.sum(alpha_raw * alpha_raw)), decay * alpha_raw
