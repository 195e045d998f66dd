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
Plain text checkpoints. The header holds one key=value line per setting of
the network (head kind, kernel series block, backbone layout and any extra
metadata); each parameter block follows as

    [array <name> <dim> ...]
    <values, %.17g, one row per line>

%.17g round-trips IEEE doubles exactly, so a reloaded network reproduces
the saved one bit for bit.
"""
import logging

import numpy as np

from cray.kcl import backbone
from cray.kcl import classifier
from cray.kcl import kernelcore
from cray.kcl.network import Network
from cray.kcl.errors import KclError

LOGGER = logging.getLogger('cray.kcl.checkpoints')

MAGIC = 'kcl-checkpoint 1'
META_PREFIX = 'meta.'
SERIES_PREFIX = 'series.'


class CheckpointError(KclError):
    """Raised when a checkpoint file is malformed."""
    pass


def _format_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return '%.17g' % value
    return str(value)


def network_header(network, metadata=None):
    header = {
        'head': 'kernelized' if network.head.kernelized else 'softmax',
        'class_count': network.class_count,
        'feature_dim': network.head.feature_dim,
    }
    if network.head.kernelized:
        for key, value in network.head.series.to_block().items():
            header[SERIES_PREFIX + key] = value
    if network.backbone_config is not None:
        header['backbone_layers'] = ','.join(str(s) for s in network.backbone_config.layer_sizes)
        header['hidden_activation'] = network.backbone_config.hidden_activation.value
        header['rectify_features'] = network.backbone_config.rectify_features
    for key, value in (metadata or {}).items():
        header[META_PREFIX + key] = value
    return header


def save_network(network, path, metadata=None):
    with open(path, 'w') as f:
        f.write(MAGIC + '\n')
        for key, value in network_header(network, metadata).items():
            f.write('{}={}\n'.format(key, _format_value(value)))
        for name, value in sorted(network.parameters().items()):
            array = np.asarray(value, dtype=float)
            f.write('[array {} {}]\n'.format(name, ' '.join(str(d) for d in array.shape)))
            rows = array.reshape(array.shape[0], -1) if array.ndim > 1 else array.reshape(1, -1)
            np.savetxt(f, rows, fmt='%.17g')
    LOGGER.debug("Saved checkpoint %s", path)


def _parse(path):
    header = {}
    arrays = {}
    with open(path) as f:
        lines = [line.rstrip('\n') for line in f]
    if not lines or lines[0] != MAGIC:
        raise CheckpointError('{} is not a checkpoint file'.format(path))
    current = None
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith('[array ') and line.endswith(']'):
            fields = line[1:-1].split()
            current = (fields[1], tuple(int(d) for d in fields[2:]))
            arrays[current] = []
        elif current is not None:
            arrays[current].extend(float(v) for v in line.split())
        else:
            key, sep, value = line.partition('=')
            if not sep:
                raise CheckpointError('Malformed header line {!r} in {}'.format(line, path))
            header[key.strip()] = value.strip()
    params = {}
    for (name, shape), values in arrays.items():
        if len(values) != int(np.prod(shape)):
            raise CheckpointError('Block {} holds {} values, expected shape {}'.format(name, len(values), shape))
        params[name] = np.array(values, dtype=float).reshape(shape)
    return header, params


def load_network(path):
    """Returns (network, metadata) for a checkpoint written by save_network."""
    header, params = _parse(path)
    class_count = int(header['class_count'])
    feature_dim = int(header['feature_dim'])
    placeholder = np.zeros((class_count, feature_dim))
    if header['head'] == 'kernelized':
        block = {key[len(SERIES_PREFIX):]: value for key, value in header.items() if key.startswith(SERIES_PREFIX)}
        head = classifier.ClassifierParams(weights=placeholder, series=kernelcore.KernelSeries.from_block(block))
    else:
        head = classifier.ClassifierParams(weights=placeholder, use_bias=True)
    backbone_config = None
    backbone_params = None
    if 'backbone_layers' in header:
        backbone_config = backbone.MlpConfig(layer_sizes=[int(s) for s in header['backbone_layers'].split(',')],
                                             hidden_activation=header['hidden_activation'],
                                             rectify_features=header['rectify_features'] == 'true')
        backbone_params = {}
    network = Network(head, backbone_config, backbone_params)
    expected = set(network.parameters())
    if backbone_config is not None:
        for i in range(backbone_config.layer_count):
            expected |= {'backbone.W{}'.format(i), 'backbone.b{}'.format(i)}
    if set(params) != expected:
        raise CheckpointError('Checkpoint blocks {} do not match the network {}'.format(sorted(params), sorted(expected)))
    network.set_parameters(params)
    metadata = {key[len(META_PREFIX):]: value for key, value in header.items() if key.startswith(META_PREFIX)}
    LOGGER.debug("Loaded checkpoint %s: %s", path, network)
    return network, metadata
