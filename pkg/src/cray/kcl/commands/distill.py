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
Knowledge distillation: a wide teacher network is trained on hard labels
(or loaded from a checkpoint), then narrow students with a kernelized or a
softmax head are trained only on the teacher's temperature-softened scores.
"""
import functools
import logging
import os

from cray.kcl import checkpoints
from cray.kcl import commands
from cray.kcl import trainer
from cray.kcl.errors import NonFiniteLoss

LOGGER = logging.getLogger('cray.kcl.commands.distill')

TEACHER_FILE = 'teacher.ckpt'
# Teachers use a separate initialization seed from students of the same run
TEACHER_SEED_OFFSET = 1000003


def train_teacher(config, train_set, test_set, writer):
    settings = config.section('distill')
    seed = config.seed + TEACHER_SEED_OFFSET
    build = functools.partial(commands.build_network, config, 'softmax', train_set.features.shape[1],
                              commands.class_count(train_set, test_set), seed,
                              hidden_layers=settings['teacher_hidden'])
    network, history, base_lr, _ = commands.fit(config, build, train_set, seed, test_set)
    for record in history:
        writer.produce(dict(record.to_dict(), role='teacher'), 'epoch')
    return network, base_lr


def load_or_train_teacher(config, train_set, test_set, out_dir, writer):
    checkpoint = config.section('distill')['teacher_checkpoint']
    if checkpoint is not None:
        LOGGER.info("Loading teacher from %s", checkpoint)
        teacher, _ = checkpoints.load_network(checkpoint)
        return teacher
    teacher, base_lr = train_teacher(config, train_set, test_set, writer)
    checkpoints.save_network(teacher, os.path.join(out_dir, TEACHER_FILE), {'role': 'teacher', 'base_lr': base_lr})
    return teacher


def distill_student(config, head, soft_train_set, test_set, seed, hidden_layers=None):
    """Trains one student on the teacher logits attached to soft_train_set."""
    temperature = config.section('distill')['temperature']
    build = functools.partial(commands.build_network, config, head, soft_train_set.features.shape[1],
                              commands.class_count(soft_train_set, test_set), seed,
                              hidden_layers=(config.section('distill')['student_hidden']
                                             if hidden_layers is None else hidden_layers))
    network, history, base_lr, _ = commands.fit(config, build, soft_train_set, seed, test_set,
                                                distill_temperature=temperature)
    return network, history, base_lr


def cmd_distill(config, out_dir):
    out_dir = commands.require_out_dir(out_dir)
    settings = config.section('distill')
    train_set, test_set, _ = commands.load_datasets(config)
    rows = []
    with commands.open_metrics(config, out_dir, 'distill') as writer:
        teacher = load_or_train_teacher(config, train_set, test_set, out_dir, writer)
        teacher_accuracy = trainer.evaluate(teacher, test_set)
        writer.produce({'role': 'teacher', 'test_accuracy': teacher_accuracy,
                        'hidden_layers': teacher.backbone_config.layer_sizes if teacher.backbone_config else []},
                       'teacher')
        LOGGER.info("Teacher test accuracy %.4f", teacher_accuracy)
        soft_train_set = train_set.with_teacher_logits(teacher.logits(train_set.features))
        for seed in settings['seeds']:
            for head in config.section('model')['heads']:
                row = {
                    'head': head,
                    'temperature': settings['temperature'],
                    'student_hidden': settings['student_hidden'],
                    'teacher_accuracy': teacher_accuracy,
                }
                try:
                    student, history, base_lr = distill_student(config, head, soft_train_set, test_set, seed)
                except NonFiniteLoss as e:
                    LOGGER.warning("%s student (seed %s) is unstable: %s", head, seed, e)
                    row.update(test_accuracy=None, base_lr=None, unstable=True)
                    writer.produce(row, 'student', seed=seed)
                    rows.append(dict(row, seed=seed))
                    continue
                for record in history:
                    writer.produce(dict(record.to_dict(), role='student', head=head), 'epoch', seed=seed)
                row.update(test_accuracy=commands.final_accuracy(student, history, test_set), base_lr=base_lr,
                           unstable=False)
                writer.produce(row, 'student', seed=seed)
                LOGGER.info("%s student (seed %s): test accuracy %.4f at T=%s", head, seed,
                            row['test_accuracy'], settings['temperature'])
                rows.append(dict(row, seed=seed))
    return rows
