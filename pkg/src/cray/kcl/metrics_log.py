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
Append-only JSON-lines metrics log. Each event is one self-describing line:
its type, the command that produced it, the configuration hash, the seed and
the event data. Keys are sorted and non-finite floats are written as null.
"""
import logging
import math

import numpy as np
import ujson as json

LOGGER = logging.getLogger('cray.kcl.metrics_log')


def _sanitize(value):
    if isinstance(value, dict):
        return {str(k): _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    if isinstance(value, np.ndarray):
        return _sanitize(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class MetricsWriter:
    """Writes metric events for one command run"""

    def __init__(self, path, command, config_hash, seed):
        self.path = path
        self.command = command
        self.config_hash = config_hash
        self.seed = seed
        self.events = 0
        self._file = open(path, 'a')

    def produce(self, data, event_type, seed=None):
        event = {
            'type': event_type,
            'command': self.command,
            'config_hash': self.config_hash,
            'seed': self.seed if seed is None else seed,
            'data': _sanitize(data),
        }
        self._file.write(json.dumps(event, sort_keys=True) + '\n')
        self.events += 1

    def flush(self):
        self._file.flush()

    def close(self):
        if not self._file.closed:
            self.flush()
            self._file.close()
            LOGGER.debug("Wrote %s events to %s", self.events, self.path)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.close()


def read_events(path, event_type=None):
    events = []
    with open(path) as f:
        for line in f:
            if line.strip():
                event = json.loads(line)
                if event_type is None or event['type'] == event_type:
                    events.append(event)
    return events
