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
# Kernelized classification layer experiment CLI

import os
import logging
import sys

from cray.kcl import commands
from cray.kcl import options
from cray.kcl.commands import ablate
from cray.kcl.commands import active
from cray.kcl.commands import check
from cray.kcl.commands import distill
from cray.kcl.commands import gen_data
from cray.kcl.commands import train

log_level = os.environ.get('STARTING_LOG_LEVEL', 'WARN')
LOG_FORMAT = "%(asctime)-15s - %(levelname)-7s - %(name)s - %(message)s"
logging.basicConfig(level=log_level, format=LOG_FORMAT)
LOGGER = logging.getLogger(__name__)

COMMANDS = {
    'gen-data': (gen_data.cmd_gen_data, 'Write the synthetic train/test datasets as CSV'),
    'train': (train.cmd_train, 'Train the softmax baseline and kernelized heads'),
    'ablate': (ablate.cmd_ablate, 'Run the kernel / activation / rectification ablation matrix'),
    'distill': (distill.cmd_distill, 'Distill a wide teacher into narrow students'),
    'active': (active.cmd_active, 'Accuracy against labeling budget for the selection strategies'),
    'check': (check.cmd_check, 'Run the gradient, PSD and series-limit property suites'),
}


def build_parser():
    common = commands.ThrowingArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='experiment config file (INI)')
    common.add_argument('--out', type=str, help='output directory')
    common.add_argument('--seed', type=int, help='overrides [experiment] seed')
    parser = commands.ThrowingArgumentParser(prog='kcl', description='Kernelized classification layer experiments')
    verbs = parser.add_subparsers(dest='command', parser_class=commands.ThrowingArgumentParser)
    verbs.required = True
    for name, (_, description) in COMMANDS.items():
        verbs.add_parser(name, parents=[common], help=description, description=description)
    return parser


@commands.exit_code_handler
def run(argv=None):
    args = build_parser().parse_args(argv)
    config = options.load_config(args.config, args.seed)
    if config.logging_level is not None:
        options.update_log_level(config.logging_level)
    LOGGER.info("Running %s with configuration %s (seed %s)", args.command, config.config_hash(), config.seed)
    command, _ = COMMANDS[args.command]
    command(config, args.out)
    return commands.EXIT_OK


def main(argv=None):
    return run(argv)


if __name__ == '__main__':
    sys.exit(main())
