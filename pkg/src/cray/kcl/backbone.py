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
A small fully-connected representation learner with hand-written backprop.

Parameters are a dict of named arrays: W<i> of shape (out, in) and b<i> of
shape (out,) for every affine layer i. Hidden layers use the configured
activation; the final feature vector is passed through ReLU only when
rectify_features is set.
"""
from dataclasses import dataclass, field
import enum
import logging

import numpy as np

from cray.kcl.errors import ShapeMismatch

LOGGER = logging.getLogger('cray.kcl.backbone')


class HiddenActivation(enum.Enum):
    RELU = 'relu'
    TANH = 'tanh'


@dataclass
class MlpConfig:
    layer_sizes: list
    hidden_activation: HiddenActivation = HiddenActivation.RELU
    rectify_features: bool = False

    def __post_init__(self):
        self.layer_sizes = [int(size) for size in self.layer_sizes]
        self.hidden_activation = HiddenActivation(self.hidden_activation)
        if len(self.layer_sizes) < 2:
            raise ShapeMismatch('An MLP needs an input size and at least one layer, got {}'.format(
                self.layer_sizes))
        if any(size < 1 for size in self.layer_sizes):
            raise ShapeMismatch('Layer sizes must be positive, got {}'.format(self.layer_sizes))

    @property
    def layer_count(self):
        return len(self.layer_sizes) - 1

    @property
    def input_dim(self):
        return self.layer_sizes[0]

    @property
    def feature_dim(self):
        return self.layer_sizes[-1]


@dataclass
class MlpCache:
    inputs: list = field(default_factory=list)
    pre_activations: list = field(default_factory=list)
    single: bool = False


def init_params(config, rng):
    """He initialization: Gaussian weights with standard deviation sqrt(2/fan_in), zero biases."""
    params = {}
    for i, (fan_in, fan_out) in enumerate(zip(config.layer_sizes[:-1], config.layer_sizes[1:])):
        params['W{}'.format(i)] = rng.standard_normal((fan_out, fan_in)) * np.sqrt(2.0 / fan_in)
        params['b{}'.format(i)] = np.zeros(fan_out)
    return params


def _check_params(config, params):
    for i, (fan_in, fan_out) in enumerate(zip(config.layer_sizes[:-1], config.layer_sizes[1:])):
        weight = params.get('W{}'.format(i))
        bias = params.get('b{}'.format(i))
        if weight is None or weight.shape != (fan_out, fan_in) or bias is None or bias.shape != (fan_out,):
            raise ShapeMismatch('Parameters for layer {} do not match sizes {} -> {}'.format(i, fan_in, fan_out))


def _activation(config, i):
    """Activation after layer i, or None for an affine output."""
    if i < config.layer_count - 1:
        return config.hidden_activation
    return HiddenActivation.RELU if config.rectify_features else None


def _apply(activation, z):
    if activation is HiddenActivation.RELU:
        return np.maximum(z, 0.0)
    if activation is HiddenActivation.TANH:
        return np.tanh(z)
    return z


def _apply_backward(activation, z, upstream):
    if activation is HiddenActivation.RELU:
        return upstream * (z > 0)
    if activation is HiddenActivation.TANH:
        return upstream * (1.0 - np.tanh(z) ** 2)
    return upstream


def mlp_forward(config, params, x):
    """Returns (features, cache) for one input vector or a batch of rows."""
    _check_params(config, params)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != config.input_dim:
        raise ShapeMismatch('Input dimension {} does not match MLP input size {}'.format(
            x.shape[-1], config.input_dim))
    cache = MlpCache(single=(x.ndim == 1))
    a = np.atleast_2d(x)
    for i in range(config.layer_count):
        cache.inputs.append(a)
        z = a @ params['W{}'.format(i)].T + params['b{}'.format(i)]
        cache.pre_activations.append(z)
        a = _apply(_activation(config, i), z)
    return (a[0] if cache.single else a), cache


def mlp_backward(config, params, cache, d_features):
    """Returns (parameter gradients keyed like params, d_input)."""
    _check_params(config, params)
    if len(cache.inputs) != config.layer_count:
        raise ShapeMismatch('Cache holds {} layers, MLP has {}'.format(len(cache.inputs), config.layer_count))
    upstream = np.atleast_2d(np.asarray(d_features, dtype=float))
    if upstream.shape != cache.pre_activations[-1].shape:
        raise ShapeMismatch('Upstream gradient shape {} does not match features {}'.format(
            upstream.shape, cache.pre_activations[-1].shape))
    grads = {}
    for i in reversed(range(config.layer_count)):
        d_z = _apply_backward(_activation(config, i), cache.pre_activations[i], upstream)
        grads['W{}'.format(i)] = d_z.T @ cache.inputs[i]
        grads['b{}'.format(i)] = np.sum(d_z, axis=0)
        upstream = d_z @ params['W{}'.format(i)]
    return grads, (upstream[0] if cache.single else upstream)
