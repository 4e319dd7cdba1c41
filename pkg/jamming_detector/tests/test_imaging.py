"""Tests for histogram image encoding."""

import unittest

import numpy as np
from pydantic import ValidationError

from jamming_detector.command_utils import enable_logging
from jamming_detector.exceptions import DimensionMismatchError, InsufficientDataError
from jamming_detector.imaging import (
    COLORMAP,
    AutoExtent,
    FixedExtent,
    HistogramImage,
    ImageConfig,
    ImageMode,
    PlaneExtent,
    compute_extent,
    make_image,
    stack_gray,
    tile_counts,
    window_stream,
)
from jamming_detector.simulation import IQRecording

_UNIT = PlaneExtent.symmetric(1.0)


def _counts_by_loop(samples, m_rows, n_cols, extent):
    """Tile counting one sample at a time, straight from the tile definition."""
    counts = np.zeros((m_rows, n_cols), dtype=np.int64)
    i_step = (extent.i_max - extent.i_min) / n_cols
    q_step = (extent.q_max - extent.q_min) / m_rows
    for sample in samples:
        i_value, q_value = sample.real, sample.imag
        if not (extent.i_min <= i_value <= extent.i_max and extent.q_min <= q_value <= extent.q_max):
            continue
        column = min(int((i_value - extent.i_min) // i_step), n_cols - 1)
        row = min(int((extent.q_max - q_value) // q_step), m_rows - 1)
        counts[row, column] += 1
    return counts


class TestExtent(unittest.TestCase):
    """Plane extent policies."""

    def test_fixed(self):
        extent = PlaneExtent.symmetric(1.5)
        self.assertEqual(compute_extent([], FixedExtent(extent=extent)), extent)

    def test_auto_constant_magnitude(self):
        samples = np.array([1 + 0j, -1 + 0.5j, 0.2 - 1j, 1 + 1j])
        self.assertAlmostEqual(compute_extent(samples, AutoExtent()).i_max, 1.05, places=12)

    def test_auto_single_sample(self):
        extent = compute_extent([(2.0, -3.0)], AutoExtent())
        self.assertAlmostEqual(extent.q_max, 3.15, places=12)
        self.assertAlmostEqual(extent.i_min, -3.15, places=12)

    def test_auto_needs_samples(self):
        with self.assertRaises(InsufficientDataError):
            compute_extent(np.zeros(0, dtype=complex), AutoExtent())
        with self.assertRaises(InsufficientDataError):
            compute_extent(np.zeros(10, dtype=complex), AutoExtent())

    def test_invalid_extent(self):
        with self.assertRaises(ValidationError):
            PlaneExtent(i_min=1.0, i_max=1.0, q_min=0.0, q_max=1.0)
        with self.assertRaises(ValidationError):
            PlaneExtent(i_min=0.0, i_max=float("inf"), q_min=0.0, q_max=1.0)

    def test_invalid_geometry(self):
        with self.assertRaises(ValidationError):
            ImageConfig(m_rows=1)
        with self.assertRaises(ValidationError):
            ImageConfig(n=0)


class TestMakeImage(unittest.TestCase):
    """Tile counting and clipping."""

    def setUp(self):
        """Mute warnings about discarded samples."""
        enable_logging()

    def test_manual_counts(self):
        cfg = ImageConfig(n=3, m_rows=2, n_cols=2)
        image = make_image([(-0.5, 0.5), (0.5, 0.5), (0.5, 0.5)], cfg, _UNIT)
        self.assertEqual(image.pixels.tolist(), [[1, 2], [0, 0]])
        self.assertEqual((image.n_used, image.n_discarded), (3, 0))

    def test_all_outside(self):
        cfg = ImageConfig(n=4, m_rows=2, n_cols=2)
        image = make_image([5 + 5j, -3 + 0j, 0 + 2j, 1.0001 + 0j], cfg, _UNIT)
        self.assertFalse(image.pixels.any())
        self.assertEqual(image.n_discarded, 4)
        self.assertTrue(image.discard_warning)

    def test_clipped_to_255(self):
        cfg = ImageConfig(n=300, m_rows=2, n_cols=2)
        image = make_image(np.full(300, 0.5 + 0.5j), cfg, _UNIT)
        self.assertEqual(image.pixels[0, 1], 255)
        self.assertEqual(image.n_used, 300)

    def test_edges(self):
        counts = tile_counts(np.array([1 + 0j, -1 - 1j, 0 + 1j, 0 + 0j]), 2, 2, _UNIT)
        # i = i_max goes to the last column, q = q_min to the last row, q = q_max to row 0.
        self.assertEqual(counts.tolist(), [[0, 1], [1, 2]])

    def test_wrong_length(self):
        with self.assertRaises(DimensionMismatchError):
            make_image(np.zeros(5, dtype=complex), ImageConfig(n=4, m_rows=2, n_cols=2), _UNIT)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(1234)
        for case in range(200):
            with self.subTest(case=case):
                m_rows, n_cols = rng.integers(2, 12, size=2)
                samples = rng.normal(0.0, 0.8, 300) + 1j * rng.normal(0.0, 0.8, 300)
                extent = PlaneExtent(
                    i_min=-rng.uniform(0.5, 2.0),
                    i_max=rng.uniform(0.5, 2.0),
                    q_min=-rng.uniform(0.5, 2.0),
                    q_max=rng.uniform(0.5, 2.0),
                )
                np.testing.assert_array_equal(
                    tile_counts(samples, int(m_rows), int(n_cols), extent),
                    _counts_by_loop(samples, int(m_rows), int(n_cols), extent),
                )

    def test_conservation(self):
        rng = np.random.default_rng(5)
        samples = rng.normal(0.0, 0.7, 5000) + 1j * rng.normal(0.0, 0.7, 5000)
        image = make_image(samples, ImageConfig(n=5000, m_rows=16, n_cols=16), _UNIT)
        self.assertEqual(image.n_used + image.n_discarded, 5000)
        self.assertEqual(int(tile_counts(samples, 16, 16, _UNIT).sum()), image.n_used)

    def test_order_independent(self):
        rng = np.random.default_rng(6)
        samples = rng.normal(0.0, 0.5, 1000) + 1j * rng.normal(0.0, 0.5, 1000)
        cfg = ImageConfig(n=1000, m_rows=10, n_cols=10)
        np.testing.assert_array_equal(
            make_image(samples, cfg, _UNIT).pixels,
            make_image(rng.permutation(samples), cfg, _UNIT).pixels,
        )

    def test_mirror(self):
        rng = np.random.default_rng(7)
        samples = rng.uniform(-1.0, 1.0, 2000) + 1j * rng.uniform(-1.0, 1.0, 2000)
        counts = tile_counts(samples, 8, 8, _UNIT)
        np.testing.assert_array_equal(tile_counts(-samples.real + 1j * samples.imag, 8, 8, _UNIT), counts[:, ::-1])
        np.testing.assert_array_equal(tile_counts(np.conj(samples), 8, 8, _UNIT), counts[::-1, :])

    def test_color_mode(self):
        cfg = ImageConfig(n=3, m_rows=2, n_cols=2, mode="color")
        image = make_image([(-0.5, 0.5), (0.5, 0.5), (0.5, 0.5)], cfg, _UNIT)
        self.assertIs(image.mode, ImageMode.COLOR)
        self.assertEqual(image.pixels.shape, (2, 2, 3))
        self.assertEqual(image.pixels[0, 1].tolist(), COLORMAP[2].tolist())

    def test_colormap(self):
        self.assertEqual(COLORMAP.shape, (256, 3))
        self.assertEqual(COLORMAP[0].tolist(), [0, 0, 255])
        self.assertEqual(COLORMAP[127].tolist(), [0, 254, 1])
        self.assertEqual(COLORMAP[128].tolist(), [1, 254, 0])
        self.assertEqual(COLORMAP[255].tolist(), [255, 0, 0])
        self.assertFalse(COLORMAP.flags.writeable)


class TestWindowStream(unittest.TestCase):
    """Consecutive windows of a recording."""

    def setUp(self):
        """Random recording of 2.5 windows."""
        enable_logging()
        rng = np.random.default_rng(9)
        self.cfg = ImageConfig(n=400, m_rows=6, n_cols=6)
        self.samples = rng.normal(0.0, 0.5, 1000) + 1j * rng.normal(0.0, 0.5, 1000)

    def test_window_count(self):
        self.assertEqual(len(window_stream(IQRecording(self.samples[:800]), self.cfg, _UNIT)), 2)
        self.assertEqual(len(window_stream(IQRecording(self.samples[:799]), self.cfg, _UNIT)), 1)
        self.assertEqual(len(window_stream(IQRecording(self.samples[:399]), self.cfg, _UNIT)), 0)

    def test_single_window(self):
        window = self.samples[:400]
        (image,) = window_stream(IQRecording(window), self.cfg, _UNIT)
        np.testing.assert_array_equal(image.pixels, make_image(window, self.cfg, _UNIT).pixels)

    def test_workers_identical(self):
        serial = window_stream(self.samples, self.cfg, _UNIT)
        threaded = window_stream(self.samples, self.cfg, _UNIT, workers=4)
        self.assertEqual([image.pixels.tobytes() for image in serial], [image.pixels.tobytes() for image in threaded])


class TestStackGray(unittest.TestCase):
    """Flattening gray images into a matrix."""

    def test_scaled_rows(self):
        image = HistogramImage(np.array([[0, 255], [1, 2]], dtype=np.uint8), _UNIT, 258, 0)
        matrix = stack_gray([image, image])
        self.assertEqual(matrix.shape, (2, 4))
        np.testing.assert_allclose(matrix[0], [0.0, 1.0, 1 / 255, 2 / 255])

    def test_empty(self):
        self.assertEqual(stack_gray([]).shape, (0, 0))

    def test_rejects_color_and_mixed_shapes(self):
        gray = HistogramImage(np.zeros((2, 2), dtype=np.uint8), _UNIT, 0, 0)
        with self.assertRaises(DimensionMismatchError):
            stack_gray([HistogramImage(COLORMAP[np.zeros((2, 2), dtype=np.uint8)], _UNIT, 0, 0)])
        with self.assertRaises(DimensionMismatchError):
            stack_gray([gray, HistogramImage(np.zeros((3, 2), dtype=np.uint8), _UNIT, 0, 0)])
