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
import logging
import os

from cray.kcl import commands
from cray.kcl.errors import ConfigError

LOGGER = logging.getLogger('cray.kcl.commands.gen_data')

TRAIN_FILE = 'train.csv'
TEST_FILE = 'test.csv'
CENTERS_FILE = 'centers.csv'


def cmd_gen_data(config, out_dir):
    """Writes the generated train and test sets (and the cluster centers) as CSV files"""
    out_dir = commands.require_out_dir(out_dir)
    spec = commands.mixture_spec(config)
    train_set, test_set = commands.generate_datasets(config, spec)
    paths = {
        'train': os.path.join(out_dir, TRAIN_FILE),
        'test': os.path.join(out_dir, TEST_FILE),
        'centers': os.path.join(out_dir, CENTERS_FILE),
    }
    try:
        train_set.save_csv(paths['train'])
        test_set.save_csv(paths['test'])
        spec.save_centers_csv(paths['centers'])
    except OSError as e:
        raise ConfigError('Unable to write datasets to {}: {}'.format(out_dir, e))
    with commands.open_metrics(config, out_dir, 'gen-data') as writer:
        writer.produce({'train_rows': len(train_set), 'test_rows': len(test_set),
                        'center_seed': config.center_seed, 'paths': paths}, 'dataset')
    LOGGER.info("Wrote %s train and %s test rows to %s", len(train_set), len(test_set), out_dir)
    return paths
