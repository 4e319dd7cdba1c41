"""Tests for the sparse autoencoder and the detection threshold."""

import math
import unittest

import numpy as np
from pydantic import ValidationError

from jamming_detector.autoencoder import (
    Architecture,
    AutoencoderModel,
    DetectorModel,
    ThresholdPolicy,
    TrainConfig,
    Transfer,
    build_detector,
    classify,
    classify_images,
    decide,
    flatten,
    forward,
    initial_model,
    loss,
    loss_and_gradients,
    mse,
    score_images,
    select_threshold,
    threshold,
    train,
    training_stats,
    unflatten,
)
from jamming_detector.base import Label
from jamming_detector.command_utils import enable_logging
from jamming_detector.exceptions import DimensionMismatchError, InsufficientDataError, TrainingDivergedError
from jamming_detector.imaging import HistogramImage, ImageConfig, PlaneExtent

_EXTENT = PlaneExtent.symmetric(1.0)


def _zero_model(d, k_hidden, enc_transfer=Transfer.LOGSIG, enc_bias=0.0, dec_bias=None):
    return AutoencoderModel(
        enc_weights=np.zeros((k_hidden, d)),
        enc_bias=np.full(k_hidden, enc_bias),
        dec_weights=np.zeros((d, k_hidden)),
        dec_bias=np.zeros(d) if dec_bias is None else np.asarray(dec_bias, dtype=np.float64),
        enc_transfer=enc_transfer,
    )


def _image(pixels):
    pixels = np.asarray(pixels, dtype=np.uint8)
    return HistogramImage(pixels, _EXTENT, int(pixels.sum()), 0)


class TestModel(unittest.TestCase):
    """Flattening, forward pass and MSE."""

    def test_flatten(self):
        np.testing.assert_allclose(flatten(_image([[0, 255], [1, 2]])), [0.0, 1.0, 1 / 255, 2 / 255])
        self.assertFalse(flatten(_image(np.zeros((3, 3)))).any())

    def test_unflatten(self):
        image = _image([[0, 255], [1, 2]])
        restored = unflatten(flatten(image), 2, 2, _EXTENT)
        np.testing.assert_array_equal(restored.pixels, image.pixels)
        with self.assertRaises(DimensionMismatchError):
            unflatten(np.zeros(5), 2, 2, _EXTENT)

    def test_forward_zero_model(self):
        hidden, reconstruction = forward(_zero_model(6, 3), np.linspace(0.0, 1.0, 6))
        np.testing.assert_array_equal(hidden, np.full(3, 0.5))
        np.testing.assert_array_equal(reconstruction, np.zeros(6))

    def test_forward_saturation(self):
        hidden, _ = forward(_zero_model(1, 1, enc_bias=20.0), np.array([0.3]))
        self.assertAlmostEqual(float(hidden[0]), 1.0, delta=1e-6)

    def test_forward_dimension(self):
        with self.assertRaises(DimensionMismatchError):
            forward(_zero_model(4, 2), np.zeros(5))

    def test_satlin(self):
        z = np.array([-0.5, 0.25, 1.5])
        np.testing.assert_array_equal(Transfer.SATLIN.apply(z), [0.0, 0.25, 1.0])
        np.testing.assert_array_equal(Transfer.SATLIN.derivative(z, Transfer.SATLIN.apply(z)), [0.0, 1.0, 0.0])

    def test_mse(self):
        self.assertEqual(mse([0.1, 0.2], [0.1, 0.2]), 0.0)
        self.assertEqual(mse([1.0, 0.0], [0.0, 0.0]), 0.5)
        self.assertAlmostEqual(mse([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]), 8 / 3, places=15)
        with self.assertRaises(DimensionMismatchError):
            mse([1.0], [1.0, 2.0])
        with self.assertRaises(DimensionMismatchError):
            mse([], [])

    def test_score_images(self):
        image = _image([[0, 255], [51, 0]])
        model = _zero_model(4, 2, dec_bias=flatten(image))
        self.assertEqual(score_images(model, [image, image]).tolist(), [0.0, 0.0])
        self.assertAlmostEqual(float(score_images(model, np.zeros((1, 4)))[0]), (1.0 + 0.04) / 4, places=15)

    def test_check(self):
        model = _zero_model(4, 2)
        with self.assertRaises(DimensionMismatchError):
            model._replace(dec_bias=np.zeros(3)).check()
        with self.assertRaises(ValueError):
            model._replace(enc_bias=np.array([0.0, math.nan])).check()


class TestLoss(unittest.TestCase):
    """Loss terms and their gradients."""

    def test_perfect_reconstruction(self):
        x = np.array([0.2, 0.4, 0.0])
        cfg = TrainConfig(sparsity_weight=0.0, l2_weight=0.0)
        total, parts = loss(_zero_model(3, 2, dec_bias=x), x[np.newaxis, :], cfg)
        self.assertEqual(total, 0.0)
        self.assertEqual(parts.recon, 0.0)

    def test_sparsity_at_target(self):
        target = 0.05
        model = _zero_model(3, 4, enc_bias=math.log(target / (1.0 - target)))
        cfg = TrainConfig(sparsity_weight=1.0, sparsity_proportion=target, l2_weight=0.0)
        _, parts = loss(model, np.zeros((2, 3)), cfg)
        self.assertAlmostEqual(parts.sparsity, 0.0, places=12)

    def test_sparsity_value(self):
        cfg = TrainConfig(sparsity_weight=1.0, sparsity_proportion=0.05, l2_weight=0.0)
        _, parts = loss(_zero_model(3, 1), np.zeros((1, 3)), cfg)
        self.assertAlmostEqual(parts.sparsity, 0.05 * math.log(0.1) + 0.95 * math.log(1.9), places=12)
        self.assertAlmostEqual(parts.sparsity, 0.49462, places=4)

    def test_l2_value(self):
        model = _zero_model(2, 1)._replace(enc_weights=np.array([[1.0, 2.0]]), dec_weights=np.array([[3.0], [0.0]]))
        _, parts = loss(model, np.zeros((1, 2)), TrainConfig(sparsity_weight=0.0, l2_weight=0.1))
        self.assertAlmostEqual(parts.l2, 0.05 * 14.0, places=14)

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(2)
        batch = rng.uniform(0.0, 1.0, (3, 16))
        cfg = TrainConfig(sparsity_weight=0.5, sparsity_proportion=0.05, l2_weight=0.01)
        step = 1e-5
        for transfer in (Transfer.LOGSIG, Transfer.SATLIN):
            model = AutoencoderModel(
                enc_weights=rng.uniform(-0.3, 0.3, (4, 16)),
                enc_bias=rng.uniform(0.2, 0.4, 4),
                dec_weights=rng.uniform(-0.3, 0.3, (16, 4)),
                dec_bias=rng.uniform(-0.1, 0.1, 16),
                enc_transfer=transfer,
            )
            _, _, gradients = loss_and_gradients(model, batch, cfg)
            for name, analytic in zip(gradients._fields, gradients):
                numeric = np.zeros_like(analytic)
                for index in np.ndindex(analytic.shape):
                    values = {}
                    for sign in (1, -1):
                        param = getattr(model, name).copy()
                        param[index] += sign * step
                        values[sign] = loss(model._replace(**{name: param}), batch, cfg)[0]
                    numeric[index] = (values[1] - values[-1]) / (2 * step)
                with self.subTest(transfer=transfer.value, param=name):
                    np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-10)

    def test_empty_batch(self):
        with self.assertRaises(InsufficientDataError):
            loss(_zero_model(3, 1), np.zeros((0, 3)), TrainConfig())


class TestTraining(unittest.TestCase):
    """Full-batch training."""

    def setUp(self):
        """Mute info logs."""
        enable_logging()

    def test_zero_epochs(self):
        batch = np.full((2, 4), 0.2)
        cfg = TrainConfig(epochs=0, seed=5)
        arch = Architecture(k_hidden=3)
        result = train(batch, cfg, arch)
        expected = initial_model(4, arch, cfg)
        for name in ("enc_weights", "enc_bias", "dec_weights", "dec_bias"):
            np.testing.assert_array_equal(getattr(result.model, name), getattr(expected, name))
        self.assertEqual(result.loss_history, [])

    def test_constant_image(self):
        image = _image(np.full((2, 2), 51))
        cfg = TrainConfig(epochs=500, sparsity_weight=0.0, l2_weight=0.0, learning_rate=0.01, seed=1)
        result = train([image], cfg, Architecture(k_hidden=1))
        self.assertLess(float(result.train_mses[0]), 1e-3)
        self.assertLess(result.loss_history[-1], result.loss_history[0])

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        batch = rng.uniform(0.0, 1.0, (5, 9))
        cfg = TrainConfig(epochs=30, seed=8)
        arch = Architecture(k_hidden=4, enc_transfer="satlin")
        first, second = train(batch, cfg, arch), train(batch, cfg, arch)
        for name in ("enc_weights", "enc_bias", "dec_weights", "dec_bias"):
            self.assertEqual(getattr(first.model, name).tobytes(), getattr(second.model, name).tobytes())
        self.assertEqual(first.train_mses.tobytes(), second.train_mses.tobytes())

    def test_diverged(self):
        cfg = TrainConfig(epochs=5, learning_rate=1e300, sparsity_weight=0.0)
        with np.errstate(all="ignore"), self.assertRaises(TrainingDivergedError):
            train(np.full((2, 4), 0.5), cfg, Architecture(k_hidden=2))

    def test_architecture(self):
        self.assertIs(Architecture(enc_transfer="SatLin").enc_transfer, Transfer.SATLIN)
        with self.assertRaises(ValidationError):
            Architecture(enc_transfer="purelin")
        with self.assertRaises(ValidationError):
            Architecture(k_hidden=0)
        with self.assertRaises(ValidationError):
            TrainConfig(sparsity_proportion=1.0)


class TestThreshold(unittest.TestCase):
    """Threshold from training MSEs."""

    def test_constant(self):
        self.assertAlmostEqual(threshold([0.25, 0.25, 0.25]), 0.25, places=15)

    def test_two_values(self):
        self.assertAlmostEqual(threshold([1.0, 3.0]), 2.0 + 3.5 * math.sqrt(2.0), places=12)
        self.assertAlmostEqual(threshold([1.0, 3.0]), 6.949747, places=6)

    def test_needs_two_values(self):
        with self.assertRaises(InsufficientDataError):
            threshold([0.1])

    def test_policies(self):
        self.assertEqual(select_threshold([1.0, 3.0, 2.0], ThresholdPolicy.MAX), 3.0)
        self.assertEqual(select_threshold([1.0, 3.0], ThresholdPolicy.MEAN_STD), threshold([1.0, 3.0]))

    def test_stats(self):
        stats = training_stats([1.0, 3.0])
        self.assertEqual((stats.mean, stats.max, stats.count), (2.0, 3.0, 2))
        self.assertAlmostEqual(stats.std, math.sqrt(2.0), places=15)


class TestClassify(unittest.TestCase):
    """Verdicts against the threshold."""

    def setUp(self):
        """Detector that reconstructs one image perfectly."""
        enable_logging()
        self.image = _image([[10, 0], [0, 200]])
        stats = training_stats([0.01, 0.03])
        self.detector = DetectorModel(
            _zero_model(4, 2, dec_bias=flatten(self.image)),
            0.02 + 3.5 * stats.std,
            stats,
            ImageConfig(n=210, m_rows=2, n_cols=2),
            _EXTENT,
        )

    def test_boundary(self):
        tau = 0.125
        self.assertIs(decide(tau, tau), Label.JAMMED)
        self.assertIs(decide(float(np.nextafter(tau, -np.inf)), tau), Label.UNJAMMED)

    def test_perfect_reconstruction_is_unjammed(self):
        verdict = classify(self.detector, self.image)
        self.assertIs(verdict.label, Label.UNJAMMED)
        self.assertEqual(verdict.score, 0.0)

    def test_score_at_tau_is_jammed(self):
        other = _image([[255, 255], [255, 255]])
        score = classify(self.detector, other).score
        self.assertIs(classify(self.detector._replace(tau=score), other).label, Label.JAMMED)

    def test_batch(self):
        verdicts = classify_images(self.detector, [self.image, _image(np.full((2, 2), 255))])
        self.assertEqual([verdict.label for verdict in verdicts], [Label.UNJAMMED, Label.JAMMED])
        self.assertEqual(classify_images(self.detector, []), [])

    def test_geometry(self):
        with self.assertRaises(DimensionMismatchError):
            classify(self.detector, _image(np.zeros((3, 2))))


class TestBuildDetector(unittest.TestCase):
    """Training plus threshold."""

    def setUp(self):
        """Random gray images."""
        enable_logging()
        rng = np.random.default_rng(4)
        self.images = [_image(rng.integers(0, 40, (2, 3))) for _ in range(6)]
        self.image_config = ImageConfig(n=1000, m_rows=2, n_cols=3)
        self.cfg = TrainConfig(epochs=20, seed=3)

    def test_tau_from_training_mses(self):
        detector = build_detector(self.images, self.cfg, Architecture(k_hidden=2), self.image_config, _EXTENT)
        scores = score_images(detector.autoencoder, self.images)
        self.assertAlmostEqual(detector.tau, threshold(scores), places=14)
        self.assertEqual(detector.train_set_size, 6)

    def test_max_policy(self):
        detector = build_detector(
            self.images, self.cfg, Architecture(k_hidden=2), self.image_config, _EXTENT, ThresholdPolicy.MAX
        )
        self.assertEqual(detector.tau, detector.stats.max)

    def test_errors(self):
        with self.assertRaises(InsufficientDataError):
            build_detector(self.images[:1], self.cfg, Architecture(k_hidden=2), self.image_config, _EXTENT)
        with self.assertRaises(DimensionMismatchError):
            build_detector(
                self.images, self.cfg, Architecture(k_hidden=2), ImageConfig(n=10, m_rows=3, n_cols=3), _EXTENT
            )
