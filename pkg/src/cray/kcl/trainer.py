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
Deterministic mini-batch SGD: momentum, linear warmup, cosine decay and
weight decay, plus evaluation and base learning rate selection.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from cray.kcl import losses
from cray.kcl.errors import ConfigError, DegenerateVector, EmptyDataset, InvalidTarget, NonFiniteLoss, ShapeMismatch
from cray.kcl.rng import make_rng

LOGGER = logging.getLogger('cray.kcl.trainer')

DEFAULT_LR_GRID = (0.3, 0.1, 0.03, 0.01)
DEFAULT_WARMUP_FRACTION = 0.05


@dataclass
class TrainConfig:
    base_lr: float = 0.1
    warmup_steps: int = 0
    total_steps: int = 1
    momentum: float = 0.9
    weight_decay: float = 0.0001
    batch_size: int = 128
    epochs: int = 100
    seed: int = 0
    loss_temperature: float = None
    distill_temperature: float = None

    def __post_init__(self):
        if not self.base_lr > 0:
            raise ConfigError('base_lr must be positive')
        if self.total_steps < 1:
            raise ConfigError('total_steps must be positive')
        if not 0 <= self.warmup_steps <= self.total_steps:
            raise ConfigError('warmup_steps must lie in [0, total_steps]')
        if not 0 <= self.momentum < 1:
            raise ConfigError('momentum must lie in [0, 1)')
        if self.weight_decay < 0:
            raise ConfigError('weight_decay must be non-negative')
        if self.batch_size < 1:
            raise ConfigError('batch_size must be positive')
        if self.epochs < 0:
            raise ConfigError('epochs must be non-negative')

    @classmethod
    def for_dataset(cls, example_count, epochs, batch_size=128, warmup_fraction=DEFAULT_WARMUP_FRACTION,
                    **kwargs):
        """Builds a config whose schedule spans exactly epochs passes over example_count rows."""
        total = max(1, epochs * steps_per_epoch(example_count, batch_size))
        warmup = int(round(warmup_fraction * total))
        return cls(warmup_steps=warmup, total_steps=total, batch_size=batch_size, epochs=epochs, **kwargs)


@dataclass
class MetricsRecord:
    epoch: int
    train_loss: float
    train_accuracy: float
    test_accuracy: float = None
    learned_alpha: list = field(default_factory=list)
    penalty: float = 0.0
    base_lr: float = None

    def to_dict(self):
        return {
            'epoch': self.epoch,
            'train_loss': self.train_loss,
            'train_accuracy': self.train_accuracy,
            'test_accuracy': self.test_accuracy,
            'learned_alpha': list(self.learned_alpha),
            'penalty': self.penalty,
            'base_lr': self.base_lr,
        }


def steps_per_epoch(example_count, batch_size):
    return int(math.ceil(example_count / batch_size))


def lr_at(config, step):
    if not 0 <= step <= config.total_steps:
        raise ValueError('Step {} is outside the schedule [0, {}]'.format(step, config.total_steps))
    if step < config.warmup_steps:
        return config.base_lr * (step + 1) / config.warmup_steps
    decay_steps = config.total_steps - config.warmup_steps
    if decay_steps == 0:
        return config.base_lr
    progress = (step - config.warmup_steps) / decay_steps
    return config.base_lr * 0.5 * (1.0 + math.cos(math.pi * progress))


def sgd_step(params, grads, velocity, lr, momentum, weight_decay, decay_mask=None):
    """
    v <- momentum * v + grad + weight_decay * param; param <- param - lr * v.
    Blocks whose decay_mask entry is False skip the weight decay term.
    Returns new (params, velocity) dicts; the inputs are not modified.
    """
    new_params = {}
    new_velocity = {}
    for key, param in params.items():
        grad = grads[key]
        if np.shape(grad) != np.shape(param):
            raise ShapeMismatch('Gradient for {} has shape {}, parameter has {}'.format(
                key, np.shape(grad), np.shape(param)))
        step = grad
        if weight_decay and (decay_mask is None or decay_mask.get(key, True)):
            step = step + weight_decay * param
        v = velocity.get(key)
        v = step if v is None else momentum * v + step
        new_velocity[key] = v
        new_params[key] = param - lr * v
    return new_params, new_velocity


def regularization_penalty(network, weight_decay):
    if not weight_decay:
        return 0.0
    mask = network.decay_mask()
    total = 0.0
    for key, param in network.parameters().items():
        if mask[key]:
            total += losses.l2_penalty(param, weight_decay)[0]
    return total


def evaluate(network, dataset):
    """Fraction of rows whose predicted class equals the label."""
    if len(dataset) == 0:
        raise EmptyDataset('Cannot evaluate on an empty dataset')
    return float(np.mean(network.predict(dataset.features) == dataset.labels))


def _batch_target(dataset, index, config):
    if config.distill_temperature is not None:
        if dataset.teacher_logits is None:
            raise InvalidTarget('Distillation requires teacher logits on the dataset')
        return losses.TeacherTargets(dataset.teacher_logits[index], config.distill_temperature)
    return dataset.labels[index]


def _check_dataset(network, dataset):
    if len(dataset) == 0:
        raise EmptyDataset('Cannot train on an empty dataset')
    if np.any(dataset.labels < 0) or np.any(dataset.labels >= network.class_count):
        raise InvalidTarget('Labels must lie in [0, {})'.format(network.class_count))
    if dataset.features.shape[1] != network.input_dim:
        raise ShapeMismatch('Dataset has {} columns, network expects {}'.format(
            dataset.features.shape[1], network.input_dim))


def _all_finite(blocks):
    return all(np.all(np.isfinite(value)) for value in blocks.values())


def _diverged(reason, epoch, step):
    LOGGER.error("%s at epoch %s step %s", reason, epoch, step)
    return NonFiniteLoss('{} at epoch {} step {}'.format(reason, epoch, step), epoch=epoch, step=step)


def train(network, dataset, config, test_dataset=None):
    """
    Trains network in place and returns one MetricsRecord per epoch.

    Raises NonFiniteLoss as soon as a batch loss, gradient, parameter or the
    regularization penalty stops being finite, or a weight or feature vector
    degenerates to zero norm.
    """
    if config.epochs == 0:
        return []
    _check_dataset(network, dataset)
    per_epoch = steps_per_epoch(len(dataset), config.batch_size)
    if config.epochs * per_epoch > config.total_steps:
        raise ConfigError('total_steps {} is shorter than {} epochs of {} steps'.format(
            config.total_steps, config.epochs, per_epoch))
    shuffle_rng = make_rng(config.seed, 'shuffle')
    mask = network.decay_mask()
    velocity = {}
    history = []
    step = 0
    LOGGER.info("Training %s on %s rows for %s epochs (base_lr=%s)",
                network, len(dataset), config.epochs, config.base_lr)
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(len(dataset))
        loss_sum = 0.0
        for start in range(0, len(dataset), config.batch_size):
            index = order[start:start + config.batch_size]
            try:
                loss, grads = network.forward_backward(dataset.features[index],
                                                       _batch_target(dataset, index, config),
                                                       config.loss_temperature)
            except DegenerateVector as e:
                raise _diverged('Degenerate vector ({})'.format(e), epoch, step)
            if not np.isfinite(loss) or not _all_finite(grads):
                raise _diverged('Loss became non-finite', epoch, step)
            params, velocity = sgd_step(network.parameters(), grads, velocity, lr_at(config, step),
                                        config.momentum, config.weight_decay, mask)
            if not _all_finite(params):
                raise _diverged('Parameters became non-finite', epoch, step)
            network.set_parameters(params)
            loss_sum += loss * len(index)
            step += 1
        penalty = regularization_penalty(network, config.weight_decay)
        if not np.isfinite(penalty):
            raise _diverged('Regularization penalty became non-finite', epoch, step - 1)
        try:
            record = MetricsRecord(epoch=epoch,
                                   train_loss=loss_sum / len(dataset),
                                   train_accuracy=evaluate(network, dataset),
                                   test_accuracy=(evaluate(network, test_dataset)
                                                  if test_dataset is not None else None),
                                   learned_alpha=network.activated_coefficients().tolist(),
                                   penalty=penalty,
                                   base_lr=config.base_lr)
        except DegenerateVector as e:
            raise _diverged('Degenerate vector ({})'.format(e), epoch, step - 1)
        LOGGER.info("Epoch %s: loss %.6f train accuracy %.4f test accuracy %s",
                    epoch, record.train_loss, record.train_accuracy, record.test_accuracy)
        history.append(record)
    return history


def select_base_lr(build_network, dataset, config, grid=DEFAULT_LR_GRID, holdout_fraction=0.2,
                   search_epochs=None, warmup_fraction=DEFAULT_WARMUP_FRACTION):
    """
    Picks the base learning rate from grid by training on a split of dataset and
    scoring the held-out rows. Ties go to the earlier grid entry; candidates that
    diverge score -inf.

    :param build_network: zero-argument callable returning a freshly initialized network
    :rtype: (float, dict of lr -> holdout accuracy)
    """
    if len(dataset) < 2:
        raise EmptyDataset('Learning rate selection needs at least two rows')
    order = make_rng(config.seed, 'holdout').permutation(len(dataset))
    holdout_count = min(len(dataset) - 1, max(1, int(round(holdout_fraction * len(dataset)))))
    holdout = dataset.subset(np.sort(order[:holdout_count]))
    fit = dataset.subset(np.sort(order[holdout_count:]))
    epochs = search_epochs if search_epochs is not None else config.epochs
    scores = {}
    for lr in grid:
        candidate = TrainConfig.for_dataset(len(fit), epochs, config.batch_size, warmup_fraction,
                                             base_lr=lr, momentum=config.momentum,
                                             weight_decay=config.weight_decay, seed=config.seed,
                                             loss_temperature=config.loss_temperature,
                                             distill_temperature=config.distill_temperature)
        network = build_network()
        try:
            train(network, fit, candidate)
            scores[lr] = evaluate(network, holdout)
        except (NonFiniteLoss, DegenerateVector) as err:
            LOGGER.warning("Learning rate %s diverged: %s", lr, err)
            scores[lr] = float('-inf')
        LOGGER.info("Learning rate %s: holdout accuracy %s", lr, scores[lr])
    best = max(grid, key=lambda lr: (scores[lr], -list(grid).index(lr)))
    if scores[best] == float('-inf'):
        raise NonFiniteLoss('Every candidate learning rate diverged')
    LOGGER.info("Selected base learning rate %s", best)
    return best, scores
