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
The blue-orange dataset on the sphere S^2 and its Bayes optimal classifier.

Each class owns a set of cluster centers drawn from N(class_mean, 0.5 I).
An observation picks one of its class's centers uniformly, draws from
N(center, 0.02 I) and is projected onto S^2. Centers are not projected.

The Bayes posterior integrates each cluster's density along the ray through
u, p_c(u) ~ sum_i integral_0^inf N(r u; mu_i, s I) r^2 dr, which is the exact
density of the projected observation.
"""
from dataclasses import dataclass, field
import logging

import numpy as np
from numpy.polynomial import legendre
from scipy.special import logsumexp, ndtr

from cray.kcl.errors import EmptyDataset, NonUnitVector, QuadratureFailure, ShapeMismatch
from cray.kcl.rng import make_rng

LOGGER = logging.getLogger('cray.kcl.synthdata')

BLUE = 0
ORANGE = 1
CLASS_MEANS = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
CENTERS_PER_CLASS = 10
CENTER_COVARIANCE_SCALE = 0.5
SAMPLE_COVARIANCE_SCALE = 0.02
SAMPLES_PER_CLASS = 5000
QUADRATURE_NODES = 512
TAIL_TOLERANCE = 1e-12
POSTERIOR_CHUNK = 256
CSV_HEADER = 'x1,x2,x3,label'


@dataclass
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    teacher_logits: np.ndarray = None

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int).reshape(-1)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ShapeMismatch('{} feature rows but {} labels'.format(self.features.shape[0], self.labels.shape[0]))
        if self.teacher_logits is not None:
            self.teacher_logits = np.asarray(self.teacher_logits, dtype=float)
            if self.teacher_logits.shape[0] != self.labels.shape[0]:
                raise ShapeMismatch('Teacher logits do not cover every row')

    def __len__(self):
        return self.labels.shape[0]

    def subset(self, index):
        index = np.asarray(index, dtype=int)
        teacher = self.teacher_logits[index] if self.teacher_logits is not None else None
        return LabeledDataset(self.features[index], self.labels[index], teacher)

    def with_teacher_logits(self, teacher_logits):
        return LabeledDataset(self.features, self.labels, teacher_logits)

    def save_csv(self, path):
        columns = ','.join('x{}'.format(i + 1) for i in range(self.features.shape[1])) + ',label'
        rows = np.column_stack([self.features, self.labels])
        fmt = ['%.17g'] * self.features.shape[1] + ['%d']
        np.savetxt(path, rows, fmt=fmt, delimiter=',', header=columns, comments='')

    @classmethod
    def load_csv(cls, path):
        rows = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
        if rows.shape[0] == 0:
            raise EmptyDataset('Dataset file {} has no rows'.format(path))
        return cls(rows[:, :-1], rows[:, -1].astype(int))


@dataclass
class MixtureSpec:
    centers: np.ndarray
    center_covariance_scale: float = CENTER_COVARIANCE_SCALE
    sample_covariance_scale: float = SAMPLE_COVARIANCE_SCALE
    class_means: np.ndarray = field(default_factory=CLASS_MEANS.copy)
    samples_per_class: int = SAMPLES_PER_CLASS

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        if self.centers.ndim != 3 or self.centers.shape[0] != 2 or self.centers.shape[2] != 3:
            raise ShapeMismatch('Centers must be a 2 x K x 3 array, got {}'.format(self.centers.shape))
        if not (self.center_covariance_scale > 0 and self.sample_covariance_scale > 0):
            raise ValueError('Covariance scales must be positive')

    @property
    def radius_max(self):
        """Upper quadrature limit: ten sample standard deviations past the farthest center."""
        return 1.0 + 10.0 * np.sqrt(self.sample_covariance_scale) + float(
            np.max(np.linalg.norm(self.centers, axis=2)))

    def save_centers_csv(self, path):
        labels = np.repeat(np.arange(2), self.centers.shape[1])
        rows = np.column_stack([self.centers.reshape(-1, 3), labels])
        np.savetxt(path, rows, fmt=['%.17g'] * 3 + ['%d'], delimiter=',', header=CSV_HEADER, comments='')


def generate_centers(seed, centers_per_class=CENTERS_PER_CLASS):
    rng = make_rng(seed, 'centers')
    scale = np.sqrt(CENTER_COVARIANCE_SCALE)
    centers = CLASS_MEANS[:, None, :] + scale * rng.standard_normal((2, centers_per_class, 3))
    return MixtureSpec(centers=centers)


def _draw_class(spec, label, count, rng):
    centers = spec.centers[label]
    chosen = rng.integers(centers.shape[0], size=count)
    draws = centers[chosen] + np.sqrt(spec.sample_covariance_scale) * rng.standard_normal((count, 3))
    norms = np.linalg.norm(draws, axis=1)
    # A zero-norm draw has probability zero; redraw it if it happens
    while np.any(norms == 0.0):
        bad = np.flatnonzero(norms == 0.0)
        draws[bad] = centers[chosen[bad]] + np.sqrt(spec.sample_covariance_scale) * rng.standard_normal((bad.size, 3))
        norms = np.linalg.norm(draws, axis=1)
    return draws / norms[:, None]


def generate_dataset(spec, n_per_class, seed, stream='train_data'):
    """
    Draws n_per_class unit vectors for each class. Rows are ordered blue first,
    then orange. Train and test sets share the mixture and use different streams.
    """
    if n_per_class < 1:
        raise ValueError('n_per_class must be at least 1')
    rng = make_rng(seed, stream)
    blue = _draw_class(spec, BLUE, n_per_class, rng)
    orange = _draw_class(spec, ORANGE, n_per_class, rng)
    labels = np.repeat([BLUE, ORANGE], n_per_class)
    LOGGER.debug("Generated %s observations per class", n_per_class)
    return LabeledDataset(np.vstack([blue, orange]), labels)


def _quadrature(spec):
    r_max = spec.radius_max
    sigma = np.sqrt(spec.sample_covariance_scale)
    center_norms = np.linalg.norm(spec.centers, axis=2)
    # Beyond r_max every point of the ray is at least (r_max - |mu|) from each center
    tail = float(np.max(ndtr(-(r_max - center_norms) / sigma)))
    if tail > TAIL_TOLERANCE:
        raise QuadratureFailure('Truncated tail mass bound {} exceeds {}'.format(tail, TAIL_TOLERANCE))
    nodes, weights = legendre.leggauss(QUADRATURE_NODES)
    radii = 0.5 * r_max * (nodes + 1.0)
    return radii, np.log(0.5 * r_max * weights) + 2.0 * np.log(radii)


def class_log_densities(spec, points):
    """Unnormalized log density of each class at each unit vector, shape (n, 2)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(np.abs(np.linalg.norm(points, axis=1) - 1.0) > 1e-9):
        raise NonUnitVector('Posterior points must be unit vectors')
    radii, log_weights = _quadrature(spec)
    s = spec.sample_covariance_scale
    center_sq = np.sum(spec.centers ** 2, axis=2)
    result = np.empty((points.shape[0], 2))
    for start in range(0, points.shape[0], POSTERIOR_CHUNK):
        chunk = points[start:start + POSTERIOR_CHUNK]
        for label in (BLUE, ORANGE):
            projections = chunk @ spec.centers[label].T
            sq_dist = (radii[None, None, :] ** 2
                       - 2.0 * radii[None, None, :] * projections[:, :, None]
                       + center_sq[label][None, :, None])
            log_terms = log_weights[None, None, :] - sq_dist / (2.0 * s)
            result[start:start + chunk.shape[0], label] = logsumexp(log_terms.reshape(chunk.shape[0], -1), axis=1)
    if not np.all(np.isfinite(result)):
        raise QuadratureFailure('Class densities underflowed for some points')
    return result


def bayes_posteriors(spec, points):
    """Posterior class probabilities (n, 2) under equal priors."""
    log_density = class_log_densities(spec, points)
    return np.exp(log_density - logsumexp(log_density, axis=1, keepdims=True))


def bayes_posterior(spec, u):
    """Posterior probability of the blue class at u (scalar for one vector)."""
    posterior = bayes_posteriors(spec, u)[:, BLUE]
    return float(posterior[0]) if np.ndim(u) == 1 else posterior


def bayes_predict(spec, points):
    """Thresholds the blue posterior at 0.5; exact ties go to blue."""
    return np.where(bayes_posteriors(spec, points)[:, BLUE] >= 0.5, BLUE, ORANGE)


def bayes_accuracy(spec, dataset):
    if len(dataset) == 0:
        raise EmptyDataset('Cannot score the Bayes classifier on an empty dataset')
    return float(np.mean(bayes_predict(spec, dataset.features) == dataset.labels))
