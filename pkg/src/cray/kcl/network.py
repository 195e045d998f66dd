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
A classification network: an optional MLP backbone feeding a classification
head (kernelized or linear). Parameters are exposed as a flat dict of named
arrays so that the optimizer can treat every block the same way.
"""
import logging

import numpy as np

from cray.kcl import backbone
from cray.kcl import classifier
from cray.kcl import kernelcore
from cray.kcl.errors import ShapeMismatch

LOGGER = logging.getLogger('cray.kcl.network')

HEAD_WEIGHTS = 'head.weights'
HEAD_BIAS = 'head.bias'
HEAD_ALPHA = 'head.alpha_raw'
HEAD_SCALE = 'head.scale_raw'
BACKBONE_PREFIX = 'backbone.'


class Network:
    def __init__(self, head, backbone_config=None, backbone_params=None):
        self.head = head
        self.backbone_config = backbone_config
        self.backbone_params = backbone_params
        if backbone_config is not None and backbone_config.feature_dim != head.feature_dim:
            raise ShapeMismatch('Backbone feature size {} does not match head dimension {}'.format(
                backbone_config.feature_dim, head.feature_dim))

    def __repr__(self):
        kind = 'kernelized' if self.head.kernelized else 'softmax'
        layers = self.backbone_config.layer_sizes if self.backbone_config else None
        return "Network(head={}, backbone={})".format(kind, layers)

    @property
    def input_dim(self):
        if self.backbone_config is not None:
            return self.backbone_config.input_dim
        return self.head.feature_dim

    @property
    def class_count(self):
        return self.head.class_count

    def copy(self):
        params = None
        if self.backbone_params is not None:
            params = {key: value.copy() for key, value in self.backbone_params.items()}
        return Network(self.head.copy(), self.backbone_config, params)

    def parameters(self):
        params = {HEAD_WEIGHTS: self.head.weights}
        if self.head.kernelized:
            if self.head.series.is_fixed:
                params[HEAD_SCALE] = self.head.series.scale_raw
            else:
                params[HEAD_ALPHA] = self.head.series.alpha_raw
        else:
            params[HEAD_BIAS] = self.head.bias
        if self.backbone_params is not None:
            for key, value in self.backbone_params.items():
                params[BACKBONE_PREFIX + key] = value
        return params

    def set_parameters(self, params):
        for key, value in params.items():
            value = np.array(value, dtype=float)
            if key == HEAD_WEIGHTS:
                self.head.weights = value
            elif key == HEAD_BIAS:
                self.head.bias = value
            elif key == HEAD_ALPHA:
                self.head.series.alpha_raw = value
            elif key == HEAD_SCALE:
                self.head.series.scale_raw = value
            elif key.startswith(BACKBONE_PREFIX):
                self.backbone_params[key[len(BACKBONE_PREFIX):]] = value
            else:
                raise KeyError('Unknown parameter block {}'.format(key))

    def decay_mask(self):
        """
        Which blocks receive weight decay. Bounded coefficient activations
        (sigmoid, softmax) and the unconstrained activation are not decayed.
        """
        mask = {key: True for key in self.parameters()}
        if HEAD_ALPHA in mask:
            mask[HEAD_ALPHA] = self.head.series.activation is kernelcore.Activation.RELU
        return mask

    def activated_coefficients(self):
        if not self.head.kernelized:
            return np.zeros(0)
        if self.head.series.is_fixed:
            return np.array([kernelcore.fixed_scale(self.head.series)])
        return kernelcore.activate_coefficients(self.head.series)

    def features(self, inputs):
        if self.backbone_config is None:
            return np.asarray(inputs, dtype=float)
        features, _ = backbone.mlp_forward(self.backbone_config, self.backbone_params, inputs)
        return features

    def scores(self, inputs):
        return classifier.raw_scores(self.head, self.features(inputs))

    def logits(self, inputs):
        return self.scores(inputs) / self.head.default_temperature()

    def predict(self, inputs):
        return np.argmax(self.logits(inputs), axis=1)

    def forward_backward(self, inputs, target, loss_temperature=None):
        """Mean loss over the batch and gradients keyed like parameters()."""
        cache = None
        if self.backbone_config is None:
            features = np.atleast_2d(np.asarray(inputs, dtype=float))
        else:
            features, cache = backbone.mlp_forward(self.backbone_config, self.backbone_params,
                                                   np.atleast_2d(inputs))
        loss, layer_grads = classifier.forward_backward_batch(self.head, features, target, loss_temperature)
        grads = {HEAD_WEIGHTS: layer_grads.d_weights}
        if self.head.kernelized:
            if self.head.series.is_fixed:
                grads[HEAD_SCALE] = layer_grads.d_scale_raw
            else:
                grads[HEAD_ALPHA] = layer_grads.d_alpha_raw
        else:
            grads[HEAD_BIAS] = layer_grads.d_bias
        if cache is not None:
            backbone_grads, _ = backbone.mlp_backward(self.backbone_config, self.backbone_params,
                                                      cache, layer_grads.d_features)
            for key, value in backbone_grads.items():
                grads[BACKBONE_PREFIX + key] = value
        return loss, grads
