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
import numpy as np

from cray.kcl import trainer
from cray.kcl.classifier import ClassifierParams
from cray.kcl.kernelcore import KernelSeries
from cray.kcl.errors import ConfigError, EmptyDataset, NonFiniteLoss
from cray.kcl.network import Network
from cray.kcl.rng import make_rng
from cray.kcl.synthdata import LabeledDataset, generate_centers, generate_dataset
from cray.kcl.test import BaseTestCase
from cray.kcl.trainer import TrainConfig


def separable_dataset(count=64):
    rng = make_rng(1, 'train_data')
    labels = np.arange(count) % 2
    centers = np.where(labels[:, None] == 0, [2.0, 1.0], [-2.0, -1.0])
    return LabeledDataset(centers + 0.1 * rng.standard_normal((count, 2)), labels)


def linear_network(dim=2, seed=0):
    return Network(ClassifierParams.init_linear(2, dim, make_rng(seed, 'init')))


def kernel_network(seed=0):
    return Network(ClassifierParams.init_kernelized(2, 3, make_rng(seed, 'init')))


class TestSchedule(BaseTestCase):

    def setUp(self):
        super(TestSchedule, self).setUp()
        self.config = TrainConfig(base_lr=0.1, warmup_steps=10, total_steps=110)

    def test_warmup_terminus(self):
        self.assertAlmostEqual(trainer.lr_at(self.config, 10), 0.1)

    def test_end_of_schedule(self):
        self.assertAlmostEqual(trainer.lr_at(self.config, 110), 0.0)

    def test_decay_midpoint(self):
        self.assertAlmostEqual(trainer.lr_at(self.config, 60), 0.05)

    def test_warmup_is_linear(self):
        self.assertAlmostEqual(trainer.lr_at(self.config, 4), 0.05)

    def test_out_of_range(self):
        self.assertRaises(ValueError, trainer.lr_at, self.config, 111)

    def test_invalid_config(self):
        self.assertRaises(ConfigError, TrainConfig, base_lr=0.0)
        self.assertRaises(ConfigError, TrainConfig, momentum=1.0)
        self.assertRaises(ConfigError, TrainConfig, warmup_steps=5, total_steps=2)

    def test_for_dataset(self):
        config = TrainConfig.for_dataset(1000, 10, batch_size=128, warmup_fraction=0.05)
        self.assertEqual(config.total_steps, 80)
        self.assertEqual(config.warmup_steps, 4)


class TestSgdStep(BaseTestCase):

    def test_plain_gradient_descent(self):
        params, _ = trainer.sgd_step({'x': np.array([1.0, 2.0])}, {'x': np.array([0.5, -1.0])}, {}, 0.1, 0.0, 0.0)
        self.assertArrayClose(params['x'], [0.95, 2.1])

    def test_zero_gradient(self):
        params, velocity = trainer.sgd_step({'x': np.array([3.0])}, {'x': np.zeros(1)}, {'x': np.zeros(1)},
                                            0.1, 0.9, 0.0)
        self.assertArrayClose(params['x'], [3.0])

    def test_momentum_recurrence_on_quadratic(self):
        a, lr, momentum, x0 = 2.0, 0.1, 0.9, 1.5
        params = {'x': np.array([x0])}
        velocity = {}
        for _ in range(2):
            params, velocity = trainer.sgd_step(params, {'x': a * params['x']}, velocity, lr, momentum, 0.0)
        v1 = a * x0
        x1 = x0 - lr * v1
        v2 = momentum * v1 + a * x1
        self.assertArrayClose(params['x'], [x1 - lr * v2])

    def test_decay_mask_skips_block(self):
        params, _ = trainer.sgd_step({'x': np.ones(1), 'y': np.ones(1)}, {'x': np.zeros(1), 'y': np.zeros(1)}, {},
                                     1.0, 0.0, 0.5, decay_mask={'x': True, 'y': False})
        self.assertArrayClose(params['x'], [0.5])
        self.assertArrayClose(params['y'], [1.0])


class TestTrain(BaseTestCase):

    def test_zero_epochs(self):
        network = kernel_network()
        before = {k: v.copy() for k, v in network.parameters().items()}
        dataset = generate_dataset(generate_centers(0), 10, 0)
        self.assertEqual(trainer.train(network, dataset, TrainConfig(epochs=0)), [])
        for key, value in network.parameters().items():
            self.assertTrue(np.array_equal(value, before[key]))

    def test_separable_reaches_full_accuracy(self):
        dataset = separable_dataset()
        network = linear_network()
        config = TrainConfig.for_dataset(len(dataset), 50, batch_size=16, base_lr=0.1)
        history = trainer.train(network, dataset, config)
        self.assertEqual(len(history), 50)
        self.assertEqual(history[-1].train_accuracy, 1.0)

    def test_deterministic(self):
        dataset = generate_dataset(generate_centers(2), 50, 2)
        config = TrainConfig.for_dataset(len(dataset), 3, batch_size=32, base_lr=0.1, seed=5)
        first, second = kernel_network(), kernel_network()
        history_a = trainer.train(first, dataset, config)
        history_b = trainer.train(second, dataset, config)
        self.assertEqual([r.to_dict() for r in history_a], [r.to_dict() for r in history_b])
        for key, value in first.parameters().items():
            self.assertTrue(np.array_equal(value, second.parameters()[key]))

    def test_metrics_record_contents(self):
        dataset = generate_dataset(generate_centers(3), 20, 3)
        test_set = generate_dataset(generate_centers(3), 20, 3, 'test_data')
        config = TrainConfig.for_dataset(len(dataset), 2, batch_size=16, base_lr=0.1)
        history = trainer.train(kernel_network(), dataset, config, test_set)
        self.assertEqual(len(history[0].learned_alpha), 13)
        self.assertIsNotNone(history[-1].test_accuracy)
        self.assertEqual(history[-1].base_lr, 0.1)
        self.assertGreater(history[-1].penalty, 0.0)

    def test_small_step_descends(self):
        dataset = generate_dataset(generate_centers(4), 64, 4)
        network = kernel_network()
        batch = dataset.subset(np.arange(32))
        loss, grads = network.forward_backward(batch.features, batch.labels)
        params, _ = trainer.sgd_step(network.parameters(), grads, {}, 1e-4, 0.0, 0.0)
        network.set_parameters(params)
        self.assertLess(network.forward_backward(batch.features, batch.labels)[0], loss)

    def test_divergence_raises(self):
        dataset = separable_dataset()
        config = TrainConfig.for_dataset(len(dataset), 5, batch_size=8, base_lr=1e300, momentum=0.0,
                                         warmup_fraction=0.0)
        error = self.assertRaises(NonFiniteLoss, trainer.train, linear_network(), dataset, config)
        self.assertIsNotNone(error.step)

    def test_schedule_too_short(self):
        dataset = separable_dataset()
        config = TrainConfig(total_steps=2, epochs=5, batch_size=8)
        self.assertRaises(ConfigError, trainer.train, linear_network(), dataset, config)

    def test_degenerate_feature_is_numerical_failure(self):
        features = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        dataset = LabeledDataset(features, [0, 1, 0, 1])
        config = TrainConfig.for_dataset(len(dataset), 1, batch_size=4, base_lr=0.1)
        error = self.assertRaises(NonFiniteLoss, trainer.train, kernel_network(), dataset, config)
        self.assertEqual((error.epoch, error.step), (0, 0))

    def test_non_finite_parameters_raise(self):
        def overflowing_step(params, grads, velocity, lr, momentum, weight_decay, mask):
            return {key: np.full_like(value, np.inf) for key, value in params.items()}, velocity
        self.patch(trainer, 'sgd_step', overflowing_step)
        dataset = separable_dataset()
        config = TrainConfig.for_dataset(len(dataset), 2, batch_size=8, base_lr=0.1)
        error = self.assertRaises(NonFiniteLoss, trainer.train, linear_network(), dataset, config)
        self.assertEqual(error.step, 0)

    def test_non_finite_penalty_raises(self):
        self.patch(trainer, 'regularization_penalty', lambda network, weight_decay: float('inf'))
        dataset = separable_dataset()
        config = TrainConfig.for_dataset(len(dataset), 2, batch_size=8, base_lr=0.1)
        error = self.assertRaises(NonFiniteLoss, trainer.train, linear_network(), dataset, config)
        self.assertEqual(error.epoch, 0)


class TestActivationStability(BaseTestCase):

    def test_bounded_activations_train_without_numerical_failure(self):
        dataset = generate_dataset(generate_centers(7), 40, 7)
        for activation in ('relu', 'sigmoid', 'softmax'):
            for base_lr in (0.3, 0.1):
                head = ClassifierParams.init_kernelized(2, 3, make_rng(7, 'init'), KernelSeries(activation=activation))
                config = TrainConfig.for_dataset(len(dataset), 3, batch_size=16, base_lr=base_lr, seed=7)
                history = trainer.train(Network(head), dataset, config)
                self.assertEqual(len(history), 3)
                self.assertTrue(all(np.isfinite(r.train_loss) for r in history))

    def adversarial_network(self, activation):
        series = KernelSeries(M=4, activation=activation, alpha_raw=np.full(7, -1e308))
        network = Network(ClassifierParams.init_kernelized(2, 3, make_rng(0, 'init'), series))
        network.set_parameters({'head.weights': np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])})
        return network

    def test_unconstrained_coefficients_diverge_from_negative_init(self):
        dataset = LabeledDataset(np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]] * 4), [0, 1] * 4)
        config = TrainConfig.for_dataset(len(dataset), 2, batch_size=4, base_lr=0.1, weight_decay=0.0)
        with np.errstate(all='ignore'):
            self.assertRaises(NonFiniteLoss, trainer.train, self.adversarial_network('none'), dataset, config)
        history = trainer.train(self.adversarial_network('relu'), dataset, config)
        self.assertEqual(len(history), 2)


class TestEvaluate(BaseTestCase):

    def test_single_correct_point(self):
        network = linear_network()
        point = np.array([[1.0, 0.5]])
        label = network.predict(point)
        self.assertEqual(trainer.evaluate(network, LabeledDataset(point, label)), 1.0)

    def test_flipped_labels(self):
        dataset = generate_dataset(generate_centers(5), 30, 5)
        network = kernel_network(5)
        accuracy = trainer.evaluate(network, dataset)
        flipped = LabeledDataset(dataset.features, 1 - dataset.labels)
        self.assertAlmostEqual(trainer.evaluate(network, flipped), 1.0 - accuracy)

    def test_empty(self):
        self.assertRaises(EmptyDataset, trainer.evaluate, linear_network(),
                          LabeledDataset(np.zeros((0, 2)), np.zeros(0, dtype=int)))


class TestSelectBaseLr(BaseTestCase):

    def test_picks_from_grid(self):
        dataset = generate_dataset(generate_centers(6), 40, 6)
        config = TrainConfig.for_dataset(len(dataset), 2, batch_size=16, seed=6)
        best, scores = trainer.select_base_lr(kernel_network, dataset, config, grid=(0.3, 0.1), search_epochs=2)
        self.assertIn(best, (0.3, 0.1))
        self.assertEqual(set(scores), {0.3, 0.1})
        self.assertEqual(scores[best], max(scores.values()))

    def test_tie_goes_to_first_candidate(self):
        dataset = separable_dataset()
        config = TrainConfig.for_dataset(len(dataset), 0, seed=1)
        best, scores = trainer.select_base_lr(linear_network, dataset, config, grid=(0.01, 0.3), search_epochs=0)
        self.assertEqual(scores[0.01], scores[0.3])
        self.assertEqual(best, 0.01)

    def test_degenerate_candidates_score_minus_infinity(self):
        features = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] * 4)
        dataset = LabeledDataset(features, [0, 1] * 8)
        config = TrainConfig.for_dataset(len(dataset), 1, batch_size=16, seed=1)
        error = self.assertRaises(NonFiniteLoss, trainer.select_base_lr, kernel_network, dataset, config,
                                  grid=(0.3, 0.1), search_epochs=1)
        self.assertIn('Every candidate', str(error))


if __name__ == '__main__':
    import unittest
    unittest.main()
