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

from cray.kcl import commands
from cray.kcl import suites
from cray.kcl.errors import PropertySuiteFailure

LOGGER = logging.getLogger('cray.kcl.commands.check')

REPORT_FORMAT = '{status:4}  {name:32} worst={worst:<12.4g} tolerance={tolerance:<10.3g} draws={draws:<4} {detail}'


def format_report(results):
    return [REPORT_FORMAT.format(status='PASS' if r.passed else 'FAIL', name=r.name, worst=r.worst,
                                 tolerance=r.tolerance, draws=r.draws, detail=r.detail)
            for r in results]


def cmd_check(config, out_dir=None):
    """
    Runs the gradient, positive semidefiniteness and series-limit suites,
    prints one report line per property and raises PropertySuiteFailure if
    any property fails.
    """
    settings = config.section('check')
    results = suites.run_suites(config.seed, settings['gradient_draws'], settings['psd_draws'],
                                settings['series_terms'])
    if out_dir:
        commands.require_out_dir(out_dir)
        with commands.open_metrics(config, out_dir, 'check') as writer:
            for result in results:
                writer.produce(result.to_dict(), 'property')
    for line in format_report(results):
        print(line)
    failed = [r for r in results if not r.passed]
    if failed:
        raise PropertySuiteFailure('{} of {} properties failed: {}'.format(
            len(failed), len(results), ', '.join(r.name for r in failed)),
            report=[r.to_dict() for r in results])
    return results
