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
Shared plumbing for the experiment commands: datasets, network
construction, training with base learning rate selection, the metrics log
and the mapping from errors to process exit codes.
"""
import argparse
from dataclasses import replace
import functools
import logging
import os

import numpy as np

from cray.kcl import backbone
from cray.kcl import classifier
from cray.kcl import kernelcore
from cray.kcl import synthdata
from cray.kcl import trainer
from cray.kcl.errors import ConfigError, KclError, NumericalFailure, PropertySuiteFailure
from cray.kcl.metrics_log import MetricsWriter
from cray.kcl.network import Network
from cray.kcl.rng import make_rng

LOGGER = logging.getLogger('cray.kcl.commands')

METRICS_FILE = 'metrics.jsonl'
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_PROPERTY = 4
HEAD_STREAMS = {'softmax': 0, 'kernelized': 1}


class ArgumentParserError(Exception):
    pass


class ThrowingArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentParserError(message)


def exit_code_handler(func):
    """Decorator turning the errors of a command run into process exit codes"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigError, ArgumentParserError) as e:
            LOGGER.error('Configuration error: {}'.format(e))
            return EXIT_CONFIG
        except NumericalFailure as e:
            LOGGER.error('Numerical failure: {}'.format(e))
            return EXIT_NUMERICAL
        except PropertySuiteFailure as e:
            LOGGER.error('Property suite failed: {}'.format(e))
            return EXIT_PROPERTY
        except KclError as e:
            LOGGER.error('{}: {}'.format(type(e).__name__, e))
            return EXIT_FAILURE
    return wrapper


def require_out_dir(out_dir):
    if not out_dir:
        raise ConfigError('This command writes files and needs --out DIR')
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise ConfigError('Unable to create output directory {}: {}'.format(out_dir, e))
    return out_dir


def open_metrics(config, out_dir, command):
    return MetricsWriter(os.path.join(out_dir, METRICS_FILE), command, config.config_hash(), config.seed)


def mixture_spec(config, seed=None):
    center_seed = config.section('data')['center_seed']
    if center_seed is None:
        center_seed = config.seed if seed is None else seed
    return synthdata.generate_centers(center_seed)


def generate_datasets(config, spec=None, seed=None):
    seed = config.seed if seed is None else seed
    spec = spec if spec is not None else mixture_spec(config, seed)
    data = config.section('data')
    train_set = synthdata.generate_dataset(spec, data['n_per_class'], seed, 'train_data')
    test_set = synthdata.generate_dataset(spec, data['n_test_per_class'], seed, 'test_data')
    return train_set, test_set


def load_datasets(config, seed=None):
    """
    Returns (train, test, spec). Datasets come from the configured CSV files
    when both are set, otherwise from the generator; spec is None for files.
    """
    data = config.section('data')
    if data['train_path'] and data['test_path']:
        LOGGER.info("Loading datasets %s and %s", data['train_path'], data['test_path'])
        return (synthdata.LabeledDataset.load_csv(data['train_path']),
                synthdata.LabeledDataset.load_csv(data['test_path']), None)
    if data['train_path'] or data['test_path']:
        raise ConfigError('data.train_path and data.test_path must be set together')
    spec = mixture_spec(config, seed)
    train_set, test_set = generate_datasets(config, spec, seed)
    return train_set, test_set, spec


def class_count(*datasets):
    return max(2, max(int(np.max(d.labels)) + 1 for d in datasets if len(d)))


def build_series(config, **overrides):
    model = dict(config.section('model'))
    model.update(overrides)
    return kernelcore.KernelSeries(mode=model['mode'], M=model['M'], activation=model['activation'],
                                   act_temperature=model['act_temperature'], degree=model['degree'],
                                   gamma=model['gamma'])


def build_network(config, head, input_dim, classes, seed, hidden_layers=None, rectify=None, series=None):
    """A freshly initialized network; identical arguments give identical parameters."""
    model = config.section('model')
    hidden_layers = model['hidden_layers'] if hidden_layers is None else hidden_layers
    rectify = model['rectify_features'] if rectify is None else rectify
    rng = make_rng(seed, 'init', HEAD_STREAMS[head])
    backbone_config = None
    backbone_params = None
    feature_dim = input_dim
    if hidden_layers:
        feature_dim = model['feature_dim']
        backbone_config = backbone.MlpConfig(layer_sizes=[input_dim] + list(hidden_layers) + [feature_dim],
                                             hidden_activation=model['hidden_activation'],
                                             rectify_features=rectify)
        backbone_params = backbone.init_params(backbone_config, rng)
    elif model['feature_dim'] != input_dim:
        raise ConfigError('Without hidden layers model.feature_dim must equal the input dimension {}'.format(
            input_dim))
    elif rectify:
        LOGGER.warning('rectify_features has no effect without hidden layers')
    if head == 'kernelized':
        params = classifier.ClassifierParams.init_kernelized(classes, feature_dim, rng,
                                                             series if series is not None else build_series(config))
    else:
        params = classifier.ClassifierParams.init_linear(classes, feature_dim, rng)
    return Network(params, backbone_config, backbone_params)


def fit(config, build, train_set, seed, test_set=None, **train_kwargs):
    """
    Trains build() on train_set. An unset train.base_lr is chosen from the
    configured grid on a holdout split first.

    :rtype: (network, history, base_lr, holdout scores or None)
    """
    settings = config.section('train')
    base_lr = settings['base_lr'] if settings['base_lr'] is not None else settings['lr_grid'][0]
    train_config = trainer.TrainConfig.for_dataset(len(train_set), settings['epochs'], settings['batch_size'],
                                                   settings['warmup_fraction'], base_lr=base_lr,
                                                   momentum=settings['momentum'],
                                                   weight_decay=settings['weight_decay'],
                                                   seed=seed, **train_kwargs)
    scores = None
    if settings['base_lr'] is None and settings['epochs'] > 0:
        base_lr, scores = trainer.select_base_lr(build, train_set, train_config, grid=settings['lr_grid'],
                                                 holdout_fraction=settings['holdout_fraction'],
                                                 search_epochs=settings['lr_search_epochs'],
                                                 warmup_fraction=settings['warmup_fraction'])
        train_config = replace(train_config, base_lr=base_lr)
    network = build()
    history = trainer.train(network, train_set, train_config, test_set)
    return network, history, train_config.base_lr, scores


def final_accuracy(network, history, test_set):
    if history and history[-1].test_accuracy is not None:
        return history[-1].test_accuracy
    return trainer.evaluate(network, test_set)
