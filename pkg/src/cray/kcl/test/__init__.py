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
import shutil
import tempfile

import numpy as np
import testtools

from cray.kcl.suites import GRADIENT_ATOL, GRADIENT_RTOL, mismatch


class BaseTestCase(testtools.TestCase):

    def setUp(self):
        super(BaseTestCase, self).setUp()
        logging.getLogger('cray.kcl').setLevel('ERROR')

    def make_temp_dir(self):
        path = tempfile.mkdtemp(prefix='kcl-test-')
        self.addCleanup(shutil.rmtree, path, True)
        return path

    def assertArrayClose(self, actual, expected, rtol=1e-12, atol=1e-12):
        actual = np.asarray(actual, dtype=float)
        expected = np.asarray(expected, dtype=float)
        self.assertEqual(actual.shape, expected.shape)
        self.assertTrue(np.allclose(actual, expected, rtol=rtol, atol=atol),
                        'arrays differ:\n{}\n{}'.format(actual, expected))

    def assertGradientClose(self, analytic, numeric, rtol=GRADIENT_RTOL, atol=GRADIENT_ATOL):
        ratio = mismatch(analytic, numeric, rtol, atol)
        self.assertLessEqual(ratio, 1.0, 'gradient mismatch ratio {}:\n{}\n{}'.format(ratio, analytic, numeric))
