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
Experiment configuration: INI files of [section] blocks with key = value
lines. Options missing from a file fall back to DEFAULTS, the coerced
result is validated against CONFIG_SCHEMA, and the canonical form is hashed
so that every metrics line can name the configuration that produced it.
"""
import configparser
import copy
import hashlib
import logging
import os

import jsonschema
import ujson as json

from cray.kcl.errors import ConfigError

LOGGER = logging.getLogger('cray.kcl.options')


def _boolean(value):
    if isinstance(value, bool):
        return value
    lowered = str(value).strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError('Not a boolean: {!r}'.format(value))


def _optional(data_type):
    def convert(value):
        if value is None or str(value).strip().lower() in ('', 'none'):
            return None
        return data_type(value)
    return convert


def _list_of(data_type):
    def convert(value):
        if isinstance(value, (list, tuple)):
            return [data_type(v) for v in value]
        return [data_type(v.strip()) for v in str(value).split(',') if v.strip()]
    return convert


def _text(value):
    return str(value).strip()


# Each entry: default value and the converter applied to the text read from file
DEFAULTS = {
    'experiment': {
        'name': ('kcl', _text),
        'seed': (0, int),
    },
    'logging': {
        'level': (None, _optional(_text)),
    },
    'data': {
        'train_path': (None, _optional(_text)),
        'test_path': (None, _optional(_text)),
        'n_per_class': (5000, int),
        'n_test_per_class': (5000, int),
        'center_seed': (None, _optional(int)),
    },
    'model': {
        'heads': (['softmax', 'kernelized'], _list_of(_text)),
        'mode': ('learned', _text),
        'M': (10, int),
        'activation': ('relu', _text),
        'act_temperature': (None, _optional(float)),
        'gamma': (1.0, float),
        'degree': (10, int),
        'hidden_layers': ([], _list_of(int)),
        'feature_dim': (3, int),
        'hidden_activation': ('relu', _text),
        'rectify_features': (False, _boolean),
    },
    'train': {
        'base_lr': (None, _optional(float)),
        'lr_grid': ([0.3, 0.1, 0.03, 0.01], _list_of(float)),
        'holdout_fraction': (0.2, float),
        'lr_search_epochs': (None, _optional(int)),
        'epochs': (100, int),
        'batch_size': (128, int),
        'momentum': (0.9, float),
        'weight_decay': (0.0001, float),
        'warmup_fraction': (0.05, float),
    },
    'ablate': {
        'kernels': (['learned', 'rbf', 'polynomial'], _list_of(_text)),
        'gammas': ([0.5, 1.0, 2.0], _list_of(float)),
        'activations': (['relu', 'sigmoid', 'softmax'], _list_of(_text)),
        'rectify': ([False], _list_of(_boolean)),
        'seeds': ([0, 1, 2], _list_of(int)),
    },
    'distill': {
        'temperature': (20.0, float),
        'teacher_hidden': ([256, 256], _list_of(int)),
        'student_hidden': ([8], _list_of(int)),
        'seeds': ([0], _list_of(int)),
        'teacher_checkpoint': (None, _optional(_text)),
    },
    'active': {
        'strategies': (['random', 'margin', 'kcenter'], _list_of(_text)),
        'budget_fractions': ([0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9], _list_of(float)),
        'seed_fraction': (0.1, float),
        'seeds': ([0], _list_of(int)),
    },
    'check': {
        'gradient_draws': (50, int),
        'psd_draws': (100, int),
        'series_terms': (50, int),
    },
}

_POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}
_FRACTION = {'type': 'number', 'exclusiveMinimum': 0, 'maximum': 1}
_SEEDS = {'type': 'array', 'items': {'type': 'integer', 'minimum': 0}, 'minItems': 1}
_LAYERS = {'type': 'array', 'items': {'type': 'integer', 'minimum': 1}}
_ACTIVATIONS = ['relu', 'sigmoid', 'softmax', 'none']
_KERNELS = ['learned', 'polynomial', 'rbf', 'linear']


def _section(properties):
    return {'type': 'object', 'properties': properties, 'additionalProperties': False}


CONFIG_SCHEMA = {
    'type': 'object',
    'additionalProperties': False,
    'properties': {
        'experiment': _section({
            'name': {'type': 'string', 'minLength': 1},
            'seed': {'type': 'integer', 'minimum': 0},
        }),
        'logging': _section({
            'level': {'enum': ['DEBUG', 'INFO', 'WARN', 'WARNING', 'ERROR', 'CRITICAL', None]},
        }),
        'data': _section({
            'train_path': {'type': ['string', 'null']},
            'test_path': {'type': ['string', 'null']},
            'n_per_class': {'type': 'integer', 'minimum': 1},
            'n_test_per_class': {'type': 'integer', 'minimum': 1},
            'center_seed': {'type': ['integer', 'null'], 'minimum': 0},
        }),
        'model': _section({
            'heads': {'type': 'array', 'items': {'enum': ['softmax', 'kernelized']}, 'minItems': 1},
            'mode': {'enum': _KERNELS},
            'M': {'type': 'integer', 'minimum': 0},
            'activation': {'enum': _ACTIVATIONS},
            'act_temperature': {'oneOf': [_POSITIVE, {'type': 'null'}]},
            'gamma': _POSITIVE,
            'degree': {'type': 'integer', 'minimum': 1},
            'hidden_layers': _LAYERS,
            'feature_dim': {'type': 'integer', 'minimum': 2},
            'hidden_activation': {'enum': ['relu', 'tanh']},
            'rectify_features': {'type': 'boolean'},
        }),
        'train': _section({
            'base_lr': {'oneOf': [_POSITIVE, {'type': 'null'}]},
            'lr_grid': {'type': 'array', 'items': _POSITIVE, 'minItems': 1},
            'holdout_fraction': {'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1},
            'lr_search_epochs': {'type': ['integer', 'null'], 'minimum': 0},
            'epochs': {'type': 'integer', 'minimum': 0},
            'batch_size': {'type': 'integer', 'minimum': 1},
            'momentum': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1},
            'weight_decay': {'type': 'number', 'minimum': 0},
            'warmup_fraction': {'type': 'number', 'minimum': 0, 'maximum': 1},
        }),
        'ablate': _section({
            'kernels': {'type': 'array', 'items': {'enum': _KERNELS}, 'minItems': 1},
            'gammas': {'type': 'array', 'items': _POSITIVE, 'minItems': 1},
            'activations': {'type': 'array', 'items': {'enum': _ACTIVATIONS}, 'minItems': 1},
            'rectify': {'type': 'array', 'items': {'type': 'boolean'}, 'minItems': 1},
            'seeds': _SEEDS,
        }),
        'distill': _section({
            'temperature': _POSITIVE,
            'teacher_hidden': _LAYERS,
            'student_hidden': _LAYERS,
            'seeds': _SEEDS,
            'teacher_checkpoint': {'type': ['string', 'null']},
        }),
        'active': _section({
            'strategies': {'type': 'array', 'items': {'enum': ['random', 'margin', 'kcenter']}, 'minItems': 1},
            'budget_fractions': {'type': 'array', 'items': _FRACTION, 'minItems': 1},
            'seed_fraction': _FRACTION,
            'seeds': _SEEDS,
        }),
        'check': _section({
            'gradient_draws': {'type': 'integer', 'minimum': 1},
            'psd_draws': {'type': 'integer', 'minimum': 1},
            'series_terms': {'type': 'integer', 'minimum': 1},
        }),
    },
}


class ExperimentConfig:
    """Typed access to one experiment's options"""

    def __init__(self, parser=None, seed_override=None, source=None):
        self.parser = parser if parser is not None else configparser.ConfigParser(interpolation=None)
        self.seed_override = seed_override
        self.source = source
        self.options = None

    def get_option(self, section, key, data_type, default=None):
        try:
            raw = self.parser.get(section, key)
        except configparser.NoSectionError:
            LOGGER.debug('Section [{}] not present.  Defaulting {} to {}'.format(section, key, default))
            return default
        except configparser.NoOptionError:
            LOGGER.debug('Option {}.{} has not been set.  Defaulting to {}'.format(section, key, default))
            return default
        try:
            return data_type(raw)
        except ValueError as e:
            raise ConfigError('Option {}.{} has an invalid value {!r}: {}'.format(section, key, raw, e))

    def refresh(self):
        known = set(DEFAULTS)
        for section in self.parser.sections():
            if section not in known:
                raise ConfigError('Unknown config section [{}]'.format(section))
            for key in self.parser.options(section):
                if key not in DEFAULTS[section]:
                    raise ConfigError('Unknown option {}.{}'.format(section, key))
        options = {}
        for section, entries in DEFAULTS.items():
            options[section] = {key: self.get_option(section, key, data_type, copy.deepcopy(default))
                                for key, (default, data_type) in entries.items()}
        if self.seed_override is not None:
            options['experiment']['seed'] = int(self.seed_override)
        try:
            jsonschema.validate(options, CONFIG_SCHEMA)
        except jsonschema.ValidationError as e:
            location = '.'.join(str(p) for p in e.absolute_path)
            raise ConfigError('Invalid configuration at {}: {}'.format(location or '<root>', e.message))
        self.options = options

    def as_dict(self):
        if self.options is None:
            self.refresh()
        return self.options

    def section(self, name):
        return self.as_dict()[name]

    @property
    def name(self):
        return self.section('experiment')['name']

    @property
    def seed(self):
        return self.section('experiment')['seed']

    @property
    def logging_level(self):
        return self.section('logging')['level']

    @property
    def center_seed(self):
        center_seed = self.section('data')['center_seed']
        return self.seed if center_seed is None else center_seed

    def config_hash(self):
        """SHA-256 of the canonical (key-sorted) coerced configuration."""
        canonical = json.dumps(self.as_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _check_referenced_files(config):
    data = config.section('data')
    for key in ('train_path', 'test_path'):
        if data[key] is not None and not os.path.isfile(data[key]):
            raise ConfigError('data.{} refers to a missing file {}'.format(key, data[key]))
    checkpoint = config.section('distill')['teacher_checkpoint']
    if checkpoint is not None and not os.path.isfile(checkpoint):
        raise ConfigError('distill.teacher_checkpoint refers to a missing file {}'.format(checkpoint))


def parse_config(text, seed_override=None, source=None):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source or '<string>')
    except configparser.Error as e:
        raise ConfigError('Unable to parse configuration: {}'.format(e))
    config = ExperimentConfig(parser, seed_override, source)
    config.refresh()
    _check_referenced_files(config)
    return config


def load_config(path=None, seed_override=None):
    """Reads an experiment config file; no path means all defaults."""
    if path is None:
        return parse_config('', seed_override)
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError('Unable to read configuration {}: {}'.format(path, e))
    config = parse_config(text, seed_override, source=path)
    LOGGER.info("Loaded configuration %s (hash %s)", path, config.config_hash())
    return config


def update_log_level(new_level_str):
    new_level = logging.getLevelName(new_level_str.upper())
    current_level = LOGGER.getEffectiveLevel()
    if current_level != new_level:
        LOGGER.log(current_level, 'Changing logging level from {} to {}'.format(
            logging.getLevelName(current_level), logging.getLevelName(new_level)))
        logger = logging.getLogger()
        logger.setLevel(new_level)
        LOGGER.log(new_level, 'Logging level changed from {} to {}'.format(
            logging.getLevelName(current_level), logging.getLevelName(new_level)))
