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
Named pseudo-random streams.

Every source of randomness is a numpy Generator backed by the PCG64 bit
generator, seeded from a SeedSequence built from the experiment seed and a
fixed stream identifier. Runs are reproducible given the seed alone.
"""
import numpy as np

STREAMS = {
    'centers': 0,
    'train_data': 1,
    'test_data': 2,
    'init': 3,
    'shuffle': 4,
    'holdout': 5,
    'active_seed': 6,
    'active_random': 7,
    'suite': 8,
}


def make_rng(seed, stream, *extra):
    """Returns a PCG64 Generator for the named stream of the given seed."""
    if stream not in STREAMS:
        raise KeyError('Unknown random stream {}'.format(stream))
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, STREAMS[stream]] + [int(e) for e in extra]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
