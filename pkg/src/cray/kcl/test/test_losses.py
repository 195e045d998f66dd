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
import math

import numpy as np

from cray.kcl import losses
from cray.kcl.errors import InvalidTarget
from cray.kcl.rng import make_rng
from cray.kcl.suites import central_difference
from cray.kcl.test import BaseTestCase


class TestSoftmaxXent(BaseTestCase):

    def test_uniform_two_classes(self):
        loss, _ = losses.softmax_xent([0.0, 0.0], 0)
        self.assertAlmostEqual(loss, math.log(2), places=6)

    def test_large_logits_do_not_overflow(self):
        loss, grad = losses.softmax_xent([1000.0, 0.0], 0)
        self.assertAlmostEqual(loss, 0.0)
        self.assertTrue(np.all(np.isfinite(grad)))

    def test_gradient_matches_finite_difference(self):
        logits = make_rng(1, 'suite').standard_normal(6)
        _, grad = losses.softmax_xent(logits, 4)
        numeric = central_difference(lambda z: losses.softmax_xent(z, 4)[0], logits)
        self.assertGradientClose(grad, numeric, rtol=1e-6, atol=1e-9)

    def test_batch_is_mean(self):
        logits = make_rng(2, 'suite').standard_normal((3, 4))
        labels = np.array([0, 3, 1])
        loss, _ = losses.softmax_xent(logits, labels)
        single = [losses.softmax_xent(logits[i], labels[i])[0] for i in range(3)]
        self.assertAlmostEqual(loss, np.mean(single))

    def test_out_of_range_label(self):
        self.assertRaises(InvalidTarget, losses.softmax_xent, [0.0, 1.0], 2)
        self.assertRaises(InvalidTarget, losses.softmax_xent, [0.0, 1.0], -1)

    def test_translation_invariance(self):
        logits = make_rng(3, 'suite').standard_normal(5)
        loss, grad = losses.softmax_xent(logits, 2)
        shifted_loss, shifted_grad = losses.softmax_xent(logits + 7.5, 2)
        self.assertAlmostEqual(loss, shifted_loss, delta=1e-10)
        self.assertArrayClose(grad, shifted_grad, rtol=0, atol=1e-10)


class TestDistillation(BaseTestCase):

    def test_soften_equal_logits(self):
        self.assertArrayClose(losses.soften(losses.TeacherTargets(np.full(4, 3.0), 7.0)), np.full(4, 0.25))

    def test_soften_large_temperature(self):
        soft = losses.soften(losses.TeacherTargets([5.0, -3.0, 1.0], 1e6))
        self.assertLess(np.max(soft) - np.min(soft), 1e-3)

    def test_soften_direct_evaluation(self):
        soft = losses.soften(losses.TeacherTargets([2.0, 0.0], 1.0))
        self.assertArrayClose(soft, [0.8807970779778823, 0.11920292202211755])

    def test_uniform_against_uniform(self):
        for temperature in (1.0, 20.0):
            loss, _ = losses.distill_xent(np.zeros(10), losses.TeacherTargets(np.zeros(10), temperature))
            self.assertAlmostEqual(loss, math.log(10), places=6)

    def test_matching_logits_give_entropy(self):
        logits = make_rng(4, 'suite').standard_normal(5)
        teacher = losses.TeacherTargets(logits, 3.0)
        soft = losses.soften(teacher)
        loss, _ = losses.distill_xent(logits, teacher)
        self.assertAlmostEqual(loss, -np.sum(soft * np.log(soft)), places=12)

    def test_gradient_matches_finite_difference(self):
        rng = make_rng(5, 'suite')
        teacher = losses.TeacherTargets(rng.standard_normal((2, 4)), 20.0)
        student = rng.standard_normal((2, 4))
        _, grad = losses.distill_xent(student, teacher)
        numeric = central_difference(lambda z: losses.distill_xent(z, teacher)[0], student)
        self.assertGradientClose(grad, numeric, rtol=1e-6, atol=1e-10)

    def test_one_hot_teacher_equals_hard_label(self):
        logits = make_rng(6, 'suite').standard_normal(4)
        soft_loss, soft_grad = losses.soft_xent(logits, np.eye(4)[1], 1.0)
        hard_loss, hard_grad = losses.softmax_xent(logits, 1)
        self.assertAlmostEqual(soft_loss, hard_loss, delta=1e-12)
        self.assertArrayClose(soft_grad, hard_grad)

    def test_shape_mismatch(self):
        self.assertRaises(InvalidTarget, losses.distill_xent, np.zeros(3), losses.TeacherTargets(np.zeros(4), 1.0))

    def test_invalid_teacher(self):
        self.assertRaises(InvalidTarget, losses.TeacherTargets, [0.0, 1.0], 0.0)
        self.assertRaises(InvalidTarget, losses.TeacherTargets, [0.0, float('inf')], 1.0)
        self.assertRaises(InvalidTarget, losses.soft_xent, np.zeros(2), [0.7, 0.7], 1.0)


class TestL2Penalty(BaseTestCase):

    def test_zero_decay(self):
        loss, grad = losses.l2_penalty([1.0, -2.0], 0.0)
        self.assertEqual(loss, 0.0)
        self.assertArrayClose(grad, [0.0, 0.0])

    def test_direct_formula(self):
        loss, grad = losses.l2_penalty([2.0], 0.0001)
        self.assertAlmostEqual(loss, 0.0002)
        self.assertArrayClose(grad, [0.0002])

    def test_gradient_matches_finite_difference(self):
        alpha = make_rng(7, 'suite').standard_normal(13)
        _, grad = losses.l2_penalty(alpha, 0.01)
        numeric = central_difference(lambda a: losses.l2_penalty(a, 0.01)[0], alpha)
        self.assertArrayClose(grad, numeric, rtol=0, atol=1e-8)


if __name__ == '__main__':
    import unittest
    unittest.main()
