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
import functools
import logging
import os

from cray.kcl import checkpoints
from cray.kcl import commands
from cray.kcl import synthdata
from cray.kcl import trainer

LOGGER = logging.getLogger('cray.kcl.commands.train')


def evaluate_checkpoint(path, dataset):
    """Reloads a saved network and scores it on dataset."""
    network, _ = checkpoints.load_network(path)
    return trainer.evaluate(network, dataset)


def cmd_train(config, out_dir):
    """
    Trains every configured head (softmax baseline and/or kernelized layer)
    on the same data, checkpoints each, and reports the Bayes accuracy when
    the data came from the generator.
    """
    out_dir = commands.require_out_dir(out_dir)
    train_set, test_set, spec = commands.load_datasets(config)
    input_dim = train_set.features.shape[1]
    classes = commands.class_count(train_set, test_set)
    results = {}
    with commands.open_metrics(config, out_dir, 'train') as writer:
        for head in config.section('model')['heads']:
            build = functools.partial(commands.build_network, config, head, input_dim, classes, config.seed)
            network, history, base_lr, scores = commands.fit(config, build, train_set, config.seed, test_set)
            if scores is not None:
                writer.produce({'head': head, 'holdout_accuracy': scores, 'base_lr': base_lr}, 'lr_selection')
            for record in history:
                writer.produce(dict(record.to_dict(), head=head), 'epoch')
            accuracy = commands.final_accuracy(network, history, test_set)
            name = '{}.ckpt'.format(head)
            path = os.path.join(out_dir, name)
            checkpoints.save_network(network, path, {'head': head, 'base_lr': base_lr, 'epochs': len(history)})
            writer.produce({'head': head, 'test_accuracy': accuracy,
                            'checkpoint_accuracy': evaluate_checkpoint(path, test_set),
                            'epochs': len(history), 'base_lr': base_lr,
                            'learned_alpha': network.activated_coefficients(),
                            'checkpoint': name}, 'result')
            LOGGER.info("%s head: test accuracy %.4f", head, accuracy)
            results[head] = accuracy
        if spec is not None:
            results['bayes'] = synthdata.bayes_accuracy(spec, test_set)
            writer.produce({'head': 'bayes', 'test_accuracy': results['bayes']}, 'result')
            LOGGER.info("Bayes optimal test accuracy %.4f", results['bayes'])
    return results
