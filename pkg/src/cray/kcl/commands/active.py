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
Batch active learning at desk scale. A seed model trained on a random
labeled seed set supplies embeddings and prediction scores; each strategy
then picks enough pool points to reach a budget fraction of the pool, and a
fresh model is trained on the seed set plus the selection.
"""
import functools
import logging

import numpy as np

from cray.kcl import active
from cray.kcl import commands

LOGGER = logging.getLogger('cray.kcl.commands.active')


def budget_for(fraction, pool_size, labeled_count):
    """Points to select so that round(fraction * pool_size) are labeled in total."""
    target = int(round(fraction * pool_size))
    return int(min(max(target - labeled_count, 0), pool_size - labeled_count))


def pool_state(network, pool, labeled, budget):
    return active.PoolState(embeddings=network.features(pool.features),
                            prediction_scores=network.logits(pool.features),
                            labeled_indices=labeled, budget=budget)


def run_curve(config, head, pool, test_set, seed, writer):
    settings = config.section('active')
    build = functools.partial(commands.build_network, config, head, pool.features.shape[1],
                              commands.class_count(pool, test_set), seed)
    labeled = active.select_seed_set(len(pool), settings['seed_fraction'], seed)
    seed_model, seed_history, _, _ = commands.fit(config, build, pool.subset(labeled), seed)
    seed_accuracy = commands.final_accuracy(seed_model, seed_history, test_set)
    writer.produce({'head': head, 'labeled': int(labeled.size), 'test_accuracy': seed_accuracy}, 'seed_model',
                   seed=seed)
    rows = []
    for strategy in settings['strategies']:
        for fraction in settings['budget_fractions']:
            budget = budget_for(fraction, len(pool), labeled.size)
            state = pool_state(seed_model, pool, labeled, budget)
            selected = active.select(strategy, state, seed)
            chosen = np.sort(np.concatenate([labeled, selected]))
            network, history, base_lr, _ = commands.fit(config, build, pool.subset(chosen), seed)
            row = {
                'head': head,
                'strategy': strategy,
                'budget_fraction': fraction,
                'labeled': int(chosen.size),
                'test_accuracy': commands.final_accuracy(network, history, test_set),
                'base_lr': base_lr,
            }
            writer.produce(row, 'active', seed=seed)
            LOGGER.info("%s/%s at %s of the pool: test accuracy %.4f", head, strategy, fraction,
                        row['test_accuracy'])
            rows.append(dict(row, seed=seed))
    return rows


def cmd_active(config, out_dir):
    """Accuracy against labeling budget for every head, strategy and seed"""
    out_dir = commands.require_out_dir(out_dir)
    pool, test_set, _ = commands.load_datasets(config)
    rows = []
    with commands.open_metrics(config, out_dir, 'active') as writer:
        for seed in config.section('active')['seeds']:
            for head in config.section('model')['heads']:
                rows.extend(run_curve(config, head, pool, test_set, seed, writer))
    return rows
