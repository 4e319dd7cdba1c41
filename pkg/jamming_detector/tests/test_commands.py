"""Tests for the jamdet command line."""

import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

from jamming_detector.base import Label
from jamming_detector.commands import main
from jamming_detector.iq_io import load_model, read_manifest
from jamming_detector.summary import FOLD_COLUMNS, read_csv

_EXPERIMENT = """
master_seed = 7

[sweep]
kinds = ["gaussian"]
rjp = [0.3, 0.8]

[dataset]
unjammed_images = 6
jammed_images = 6

[image]
n = 500
m_rows = 8
n_cols = 8

[train]
epochs = 20
learning_rate = 0.01

[architecture]
k_hidden = 2

[evaluation]
k = 3
"""


class _CommandTestCase(unittest.TestCase):
    def setUp(self):
        """Scratch directory."""
        self._temp = TemporaryDirectory()  # pylint: disable=consider-using-with
        self.addCleanup(self._temp.cleanup)
        self.root = Path(self._temp.name)

    def run_command(self, *args, expected=0):
        """Run `jamdet` with string arguments and check the exit code."""
        code = main([str(arg) for arg in args])
        self.assertEqual(code, expected, f"jamdet {' '.join(str(arg) for arg in args)}")

    def simulate(self, directory, name, symbols, *extra):
        """Simulate one recording into `directory`."""
        self.run_command("simulate", "--out", directory, "--name", name, "--symbols", symbols, *extra)
        return directory / f"{name}.iq"

    def encode(self, source, directory, *extra, n=500):
        """Encode with a fixed extent and return the image manifest."""
        self.run_command(
            "encode", "--in", source, "--n", n, "--size", 8, "--extent", -2, 2, -2, 2, "--out", directory, *extra
        )
        return directory / "manifest.txt"


class TestUsage(_CommandTestCase):
    """Exit codes."""

    def test_no_command(self):
        self.run_command(expected=2)

    def test_negative_rjp(self):
        self.run_command("simulate", "--out", self.root, "--jam", "gaussian", "--rjp", -0.1, expected=2)

    def test_unknown_flag(self):
        self.run_command("train", "--images", "missing.txt", "--out-model", "m.json", "--bogus", expected=2)

    def test_missing_file(self):
        missing = self.root / "missing.txt"
        self.run_command("train", "--images", missing, "--out-model", self.root / "m.json", expected=1)


class TestSimulate(_CommandTestCase):
    """The simulate command."""

    def test_deterministic(self):
        args = ("--jam", "deceptive", "--rjp", 0.4, "--ror", 2, "--jor", 3, "--seed", 99)
        first = self.simulate(self.root / "a", "rec", 2000, *args)
        second = self.simulate(self.root / "b", "rec", 2000, *args)
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertEqual(first.stat().st_size, 2000 * 2 * 8)
        self.assertEqual(
            (self.root / "a" / "manifest.txt").read_bytes(), (self.root / "b" / "manifest.txt").read_bytes()
        )

    def test_no_jammer_ignores_rjp(self):
        self.simulate(self.root, "clean", 100, "--jam", "none", "--rjp", 0.5)
        (entry,) = read_manifest(self.root / "manifest.txt").entries
        self.assertIs(entry.label, Label.UNJAMMED)
        self.assertEqual(entry.rjp, 0.0)

    def test_manifest_accumulates(self):
        self.simulate(self.root, "clean", 100)
        self.simulate(self.root, "jam", 100, "--jam", "tone", "--rjp", 0.2)
        self.simulate(self.root, "jam", 100, "--jam", "tone", "--rjp", 0.3)
        manifest = read_manifest(self.root / "manifest.txt")
        self.assertEqual([entry.path for entry in manifest], ["clean.iq", "jam.iq"])
        self.assertEqual(manifest.entries[1].rjp, 0.3)


class TestEncode(_CommandTestCase):
    """The encode command."""

    def test_windows(self):
        recording = self.simulate(self.root / "raw", "clean", 1200)
        manifest = read_manifest(self.encode(self.root / "raw" / "manifest.txt", self.root / "images"))
        self.assertEqual([entry.path for entry in manifest], ["clean-00000.pgm", "clean-00001.pgm"])
        self.assertEqual(manifest.image_config.d, 64)
        self.assertTrue(all(entry.label is Label.UNJAMMED and entry.source == recording.name for entry in manifest))

    def test_images_carry_provenance(self):
        self.simulate(self.root / "raw", "clean", 500)
        manifest = read_manifest(self.encode(self.root / "raw" / "manifest.txt", self.root / "images"))
        (entry,) = manifest.entries
        data = (self.root / "images" / entry.path).read_bytes()
        self.assertIn(b"# tool=jamdet\n", data)
        self.assertIn(f"# config_hash={manifest.header['config_hash']}\n".encode("ascii"), data)

    def test_short_recording(self):
        self.simulate(self.root / "raw", "clean", 100)
        manifest = read_manifest(self.encode(self.root / "raw" / "manifest.txt", self.root / "images"))
        self.assertEqual(len(manifest), 0)

    def test_color(self):
        self.simulate(self.root / "raw", "clean", 500)
        images = self.encode(self.root / "raw" / "manifest.txt", self.root / "images", "--mode", "color")
        manifest = read_manifest(images)
        (entry,) = manifest.entries
        self.assertTrue(entry.path.endswith(".ppm"))
        self.assertTrue((self.root / "images" / entry.path).read_bytes().startswith(b"P6"))

    def test_extent_from_calibration(self):
        recording = self.simulate(self.root / "raw", "clean", 1000)
        self.run_command(
            "encode", "--in", recording, "--label", "unjammed", "--n", 500, "--size", "6x4",
            "--extent-from", recording, "--out", self.root / "images",
        )  # fmt: skip
        manifest = read_manifest(self.root / "images" / "manifest.txt")
        self.assertEqual(len(manifest), 2)
        self.assertEqual((manifest.image_config.m_rows, manifest.image_config.n_cols), (6, 4))
        self.assertEqual(manifest.extent.i_max, -manifest.extent.i_min)

    def test_usage_errors(self):
        recording = self.simulate(self.root / "raw", "clean", 500)
        self.run_command("encode", "--in", recording, "--label", "unjammed", "--out", self.root, expected=2)
        self.run_command(
            "encode", "--in", recording, "--extent", -1, 1, -1, 1, "--n", 500, "--out", self.root, expected=2
        )


class TestPipeline(_CommandTestCase):
    """simulate, encode, train and detect."""

    def setUp(self):
        """Unjammed training images and a jammed recording."""
        super().setUp()
        self.simulate(self.root / "clean", "clean", 5000, "--seed", 1)
        self.images = self.encode(self.root / "clean" / "manifest.txt", self.root / "images")
        self.jammed = self.simulate(self.root / "jam", "jam", 1500, "--jam", "gaussian", "--rjp", 0.8, "--seed", 2)
        self.model = self.root / "model.json"

    def train(self, images, expected=0):
        """Train a small detector."""
        self.run_command(
            "train", "--images", images, "--epochs", 30, "--hidden", 2, "--learning-rate", 0.01, "--seed", 3,
            "--out-model", self.model, expected=expected,
        )  # fmt: skip

    def test_train_and_detect(self):
        self.train(self.images)
        model = load_model(self.model)
        self.assertEqual(model.detector.train_set_size, 10)
        self.assertIn("manifest_hash", model.provenance)

        for name in ("first.txt", "second.txt"):
            self.run_command("detect", "--model", self.model, "--in", self.jammed, "--out", self.root / name)
        text = (self.root / "first.txt").read_text(encoding="utf-8")
        self.assertEqual(text, (self.root / "second.txt").read_text(encoding="utf-8"))

        lines = text.splitlines()
        header = [line for line in lines if line.startswith("# ")]
        body = [line for line in lines if not line.startswith("# ")]
        self.assertEqual(lines[: len(header)], header)
        self.assertIn("# tool=jamdet", header)
        self.assertIn("# model=model.json", header)
        self.assertTrue(any(line.startswith("# config_hash=") for line in header))
        self.assertEqual(len(body), 4)
        for index, line in enumerate(body[:3]):
            window, score, verdict = line.split()
            self.assertEqual(int(window), index)
            self.assertGreaterEqual(float(score), 0.0)
            self.assertIn(verdict, ("JAMMED", "UNJAMMED"))
        self.assertTrue(body[3].startswith("jammed_fraction "))

    def test_detect_csv_on_images(self):
        self.train(self.images)
        out = self.root / "verdicts.csv"
        self.run_command("detect", "--model", self.model, "--in", self.images, "--format", "csv", "--out", out)
        lines = out.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "# tool=jamdet")
        rows = [line for line in lines if not line.startswith("#")]
        self.assertEqual(rows[0], "window,mse,verdict")
        self.assertEqual(len(rows), 11)
        self.assertTrue(lines[-1].startswith("# jammed_fraction="))

    def test_detect_refuses_other_geometry(self):
        self.train(self.images)
        clean = self.root / "clean" / "manifest.txt"
        wider = self.root / "wider"
        self.run_command(
            "encode", "--in", clean, "--n", 500, "--size", 8, "--extent", -3, 3, -3, 3, "--out", wider
        )  # fmt: skip
        shorter = self.encode(clean, self.root / "shorter", n=250)
        smaller = self.encode(clean, self.root / "smaller", "--size", 4)
        for images in (wider / "manifest.txt", shorter, smaller):
            with self.subTest(images=images.parent.name):
                self.run_command("detect", "--model", self.model, "--in", images, expected=1)

    def test_train_refuses_jammed(self):
        jammed_images = self.encode(self.root / "jam" / "manifest.txt", self.root / "jammed-images")
        self.train(jammed_images, expected=1)
        self.assertFalse(self.model.exists())

    def test_train_needs_two_images(self):
        self.simulate(self.root / "one", "one", 500)
        self.train(self.encode(self.root / "one" / "manifest.txt", self.root / "one-image"), expected=1)
        self.assertFalse(self.model.exists())


class TestEvaluateAndReport(_CommandTestCase):
    """The evaluate and report commands."""

    def setUp(self):
        """Write the experiment file."""
        super().setUp()
        self.config = self.root / "experiment.toml"
        self.config.write_text(_EXPERIMENT, encoding="utf-8")

    def test_evaluate_is_deterministic(self):
        self.run_command("evaluate", "--config", self.config, "--out", self.root / "serial")
        self.run_command("evaluate", "--config", self.config, "--out", self.root / "threaded", "--workers", 3)

        header, rows = read_csv(self.root / "serial" / "summary.csv")
        self.assertEqual(header["master_seed"], "7")
        self.assertEqual([row["rjp"] for row in rows], ["0.3", "0.8"])
        self.assertTrue(all(row["error"] == "" for row in rows))
        for name in ("summary.csv", "summary.txt"):
            with self.subTest(file=name):
                self.assertEqual(
                    (self.root / "serial" / name).read_bytes(), (self.root / "threaded" / name).read_bytes()
                )
        folds = sorted((self.root / "serial").rglob("folds.csv"))
        self.assertEqual(len(folds), 2)
        _, fold_rows = read_csv(folds[0])
        self.assertEqual(tuple(fold_rows[0]), FOLD_COLUMNS)
        self.assertEqual(
            tuple(fold_rows[0])[5:12],
            ("accuracy", "tpr_predictive", "tnr_predictive", "recall", "specificity", "auc", "tau"),
        )
        self.assertEqual([row["fold"] for row in fold_rows], ["0", "1", "2", "summary"])
        for path in folds:
            threaded = self.root / "threaded" / path.relative_to(self.root / "serial")
            self.assertEqual(path.read_bytes(), threaded.read_bytes())

        out = self.root / "rjp.csv"
        self.run_command("report", "--in", self.root / "serial", "--kind", "rjp", "--metric", "auc", "--out", out)
        _, plot = read_csv(out)
        self.assertEqual([float(row["x"]) for row in plot], [0.3, 0.8])
        self.assertTrue(all(float(row["ci_lo"]) <= float(row["mean"]) <= float(row["ci_hi"]) for row in plot))

        out = self.root / "hist.csv"
        self.run_command("report", "--in", self.root / "serial", "--kind", "mse-hist", "--bins", 5, "--out", out)
        _, histogram = read_csv(out)
        self.assertEqual(len(histogram), 5)
        self.assertEqual(sum(int(row["unjammed"]) + int(row["jammed"]) for row in histogram), 2 * 12)

    def test_invalid_config(self):
        self.config.write_text("master_seed = 1\n[sweep]\nkinds = ['none']\n", encoding="utf-8")
        self.run_command("evaluate", "--config", self.config, "--out", self.root / "out", expected=2)

    def test_report_without_inputs(self):
        out = self.root / "empty.csv"
        self.run_command("report", "--kind", "rjp", "--out", out)
        header, rows = read_csv(out)
        self.assertEqual(rows, [])
        self.assertEqual(header["kind"], "rjp")
        self.assertEqual(out.read_text(encoding="utf-8").splitlines()[-1], "x,mean,ci_lo,ci_hi")
