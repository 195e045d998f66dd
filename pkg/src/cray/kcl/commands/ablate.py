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
Kernel, coefficient activation and feature rectification ablations. Every
combination of the requested axes is one variant; each variant is trained
once per ablation seed and reported as one row of ablation.csv. Fixed
kernels ignore the coefficient activation, so their runs are shared by every
activation row of the same kernel and rectify setting.
"""
import csv
import functools
import itertools
import logging
import os

import numpy as np

from cray.kcl import commands
from cray.kcl import kernelcore
from cray.kcl.errors import NonFiniteLoss

LOGGER = logging.getLogger('cray.kcl.commands.ablate')

ABLATION_FILE = 'ablation.csv'
ABLATION_COLUMNS = ['kernel', 'activation', 'rectify', 'mean_test_accuracy', 'unstable', 'collapsed',
                    'test_accuracies', 'gammas']
COLLAPSED_SCALE = 1e-3


def variants(settings):
    return list(itertools.product(settings['kernels'], settings['activations'], settings['rectify']))


def is_collapsed(network, test_set):
    """
    A run has collapsed when its fixed kernel scale has shrunk to nothing or
    it predicts a single class on a test set holding several.
    """
    series = network.head.series if network.head.kernelized else None
    if series is not None and series.is_fixed and kernelcore.fixed_scale(series) < COLLAPSED_SCALE:
        return True
    if len(test_set) == 0 or np.unique(test_set.labels).size < 2:
        return False
    return np.unique(network.predict(test_set.features)).size == 1


def _run_once(config, train_set, test_set, seed, kernel, activation, rectify, gamma=None):
    overrides = {'mode': kernel, 'activation': activation, 'act_temperature': None}
    if gamma is not None:
        overrides['gamma'] = gamma
    series = commands.build_series(config, **overrides)
    build = functools.partial(commands.build_network, config, 'kernelized', train_set.features.shape[1],
                              commands.class_count(train_set, test_set), seed, rectify=rectify, series=series)
    network, history, base_lr, _ = commands.fit(config, build, train_set, seed, test_set)
    return commands.final_accuracy(network, history, test_set), base_lr, is_collapsed(network, test_set)


def run_variant(config, datasets, kernel, activation, rectify, writer):
    """Trains one variant on every seed; returns its table row."""
    settings = config.section('ablate')
    accuracies = []
    gammas = []
    unstable = False
    collapsed = False
    for seed in settings['seeds']:
        train_set, test_set = datasets[seed]
        candidates = settings['gammas'] if kernel == 'rbf' else [None]
        best = None
        for gamma in candidates:
            try:
                accuracy, base_lr, dead = _run_once(config, train_set, test_set, seed, kernel, activation, rectify,
                                                    gamma)
            except NonFiniteLoss as e:
                LOGGER.warning("Variant %s/%s/%s seed %s is unstable: %s", kernel, activation, rectify, seed, e)
                unstable = True
                writer.produce({'kernel': kernel, 'activation': activation, 'rectify': rectify, 'gamma': gamma,
                                'unstable': True, 'collapsed': False, 'epoch': e.epoch, 'step': e.step},
                               'ablation_run', seed=seed)
                continue
            writer.produce({'kernel': kernel, 'activation': activation, 'rectify': rectify, 'gamma': gamma,
                            'unstable': False, 'collapsed': dead, 'test_accuracy': accuracy, 'base_lr': base_lr},
                           'ablation_run', seed=seed)
            if dead:
                LOGGER.warning("Variant %s/%s/%s seed %s collapsed", kernel, activation, rectify, seed)
                collapsed = True
                continue
            if best is None or accuracy > best[0]:
                best = (accuracy, gamma)
        accuracies.append(None if best is None else best[0])
        gammas.append(None if best is None else best[1])
    finished = [a for a in accuracies if a is not None]
    return {
        'kernel': kernel,
        'activation': activation,
        'rectify': rectify,
        'mean_test_accuracy': float(np.mean(finished)) if finished else None,
        'unstable': unstable,
        'collapsed': collapsed,
        'test_accuracies': accuracies,
        'gammas': gammas if kernel == 'rbf' else [],
    }


def _csv_value(value):
    if isinstance(value, list):
        return ';'.join('' if v is None else str(v) for v in value)
    return '' if value is None else value


def write_table(rows, path):
    with open(path, 'w', newline='') as f:
        table = csv.DictWriter(f, fieldnames=ABLATION_COLUMNS)
        table.writeheader()
        for row in rows:
            table.writerow({key: _csv_value(row[key]) for key in ABLATION_COLUMNS})


def cmd_ablate(config, out_dir):
    out_dir = commands.require_out_dir(out_dir)
    settings = config.section('ablate')
    datasets = {}
    for seed in settings['seeds']:
        train_set, test_set, _ = commands.load_datasets(config, seed)
        datasets[seed] = (train_set, test_set)
    rows = []
    shared = {}
    with commands.open_metrics(config, out_dir, 'ablate') as writer:
        for kernel, activation, rectify in variants(settings):
            if kernelcore.KernelMode(kernel) is kernelcore.KernelMode.LEARNED:
                row = run_variant(config, datasets, kernel, activation, rectify, writer)
            elif (kernel, rectify) in shared:
                row = dict(shared[(kernel, rectify)], activation=activation)
            else:
                row = run_variant(config, datasets, kernel, activation, rectify, writer)
                shared[(kernel, rectify)] = row
            writer.produce(row, 'ablation')
            LOGGER.info("Variant %s/%s/rectify=%s: mean test accuracy %s%s", kernel, activation, rectify,
                        row['mean_test_accuracy'], ' (unstable)' if row['unstable'] else '')
            rows.append(row)
    write_table(rows, os.path.join(out_dir, ABLATION_FILE))
    return rows
