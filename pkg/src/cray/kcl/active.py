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
Batch subset selection for the active learning protocol: a seed model is
trained on a labeled seed set, then a budget of pool points is chosen at once
from its embeddings and prediction scores.
"""
from dataclasses import dataclass
import logging

import numpy as np
from sklearn.metrics import pairwise_distances

from cray.kcl.errors import BudgetExceeded, EmptySeedSet, ShapeMismatch
from cray.kcl.rng import make_rng

LOGGER = logging.getLogger('cray.kcl.active')


@dataclass
class PoolState:
    embeddings: np.ndarray
    prediction_scores: np.ndarray
    labeled_indices: np.ndarray
    budget: int

    def __post_init__(self):
        self.embeddings = np.atleast_2d(np.asarray(self.embeddings, dtype=float))
        self.prediction_scores = np.atleast_2d(np.asarray(self.prediction_scores, dtype=float))
        self.labeled_indices = np.unique(np.asarray(self.labeled_indices, dtype=int).reshape(-1))
        n = self.embeddings.shape[0]
        if self.prediction_scores.shape[0] != n:
            raise ShapeMismatch('{} embeddings but {} score rows'.format(n, self.prediction_scores.shape[0]))
        if self.labeled_indices.size and (self.labeled_indices[0] < 0 or self.labeled_indices[-1] >= n):
            raise ValueError('Labeled indices fall outside the pool of {} points'.format(n))
        if self.budget < 0:
            raise BudgetExceeded('Budget must be non-negative, got {}'.format(self.budget))
        if self.budget > self.unlabeled_count:
            raise BudgetExceeded('Budget {} exceeds the {} unlabeled points'.format(self.budget, self.unlabeled_count))

    @property
    def pool_size(self):
        return self.embeddings.shape[0]

    @property
    def unlabeled_count(self):
        return self.pool_size - self.labeled_indices.size

    def unlabeled_mask(self):
        mask = np.ones(self.pool_size, dtype=bool)
        mask[self.labeled_indices] = False
        return mask


def select_seed_set(pool_size, fraction, seed):
    """Random labeled seed set covering `fraction` of the pool, at least one point."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError('Seed fraction must be in (0, 1], got {}'.format(fraction))
    count = max(1, int(round(fraction * pool_size)))
    rng = make_rng(seed, 'active_seed')
    return np.sort(rng.choice(pool_size, size=count, replace=False))


def select_random(state, seed):
    unlabeled = np.flatnonzero(state.unlabeled_mask())
    rng = make_rng(seed, 'active_random')
    return np.sort(rng.choice(unlabeled, size=state.budget, replace=False))


def margins(prediction_scores):
    """Gap between the top two scores of every row."""
    top_two = np.sort(prediction_scores, axis=1)[:, -2:]
    return top_two[:, 1] - top_two[:, 0]


def select_margin(state):
    """Unlabeled points with the smallest top-2 score gap, ranked; ties by index."""
    if state.prediction_scores.shape[1] < 2:
        raise ShapeMismatch('Margin sampling needs at least two classes')
    unlabeled = np.flatnonzero(state.unlabeled_mask())
    gaps = margins(state.prediction_scores[unlabeled])
    rank = np.argsort(gaps, kind='stable')
    return unlabeled[rank[:state.budget]]


def cosine_distances(embeddings, centers):
    return np.maximum(pairwise_distances(embeddings, centers, metric='cosine'), 0.0)


def covering_radius(embeddings, center_indices):
    """Largest cosine distance from any point to its nearest center."""
    center_indices = np.asarray(center_indices, dtype=int)
    if center_indices.size == 0:
        raise EmptySeedSet('Covering radius needs at least one center')
    distances = cosine_distances(embeddings, embeddings[center_indices])
    return float(np.max(np.min(distances, axis=1)))


def select_kcenter(state):
    """
    Greedy farthest-first traversal in cosine distance. Each step adds the
    unlabeled point farthest from its nearest labeled-or-selected point.
    Returned in selection order; ties go to the lowest index.
    """
    if state.labeled_indices.size == 0:
        raise EmptySeedSet('k-center selection needs a labeled seed set')
    embeddings = state.embeddings
    min_distances = np.min(cosine_distances(embeddings, embeddings[state.labeled_indices]), axis=1)
    available = state.unlabeled_mask()
    selected = []
    for _ in range(state.budget):
        candidates = np.where(available, min_distances, -np.inf)
        index = int(np.argmax(candidates))
        selected.append(index)
        available[index] = False
        new_distances = cosine_distances(embeddings, embeddings[index:index + 1])[:, 0]
        min_distances = np.minimum(min_distances, new_distances)
    LOGGER.debug("k-center selected %s points; covering radius %s", len(selected),
                 float(np.max(min_distances)) if selected else None)
    return np.asarray(selected, dtype=int)


STRATEGIES = {
    'random': lambda state, seed: select_random(state, seed),
    'margin': lambda state, seed: select_margin(state),
    'kcenter': lambda state, seed: select_kcenter(state),
}


def select(strategy, state, seed):
    try:
        selector = STRATEGIES[strategy]
    except KeyError:
        raise ValueError('Unknown selection strategy {!r}'.format(strategy))
    return selector(state, seed)
