#!/usr/bin/env python3
"""
Tests for the click command group.
"""

import os
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

from click.testing import CliRunner

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli import NUMERIC_ERROR_EXIT, PARSE_ERROR_EXIT, cli
from scenarios import NumericFailure

FIG8 = "L1_plus = 2\nL1_minus = -1\nL2_plus = -2\nL2_minus = 1\na = 1\n"


class TestCli(unittest.TestCase):
    """Unit tests for the command-line front end"""

    def setUp(self):
        self.runner = CliRunner()

    def write(self, name, text):
        Path(name).write_text(text, encoding="utf-8")
        return name

    def test_scan_writes_outputs(self):
        with self.runner.isolated_filesystem():
            config = self.write("fig8.cfg", FIG8 + "samples = 100\noutputs = csv, plotscript, report\n")
            result = self.runner.invoke(cli, ["scan", "--config", config, "--out", "results"])
            self.assertEqual(result.exit_code, 0, msg=result.output)
            for name in ("fig8_scan.csv", "fig8_scan.gp", "fig8_report.txt"):
                self.assertTrue((Path("results") / name).exists())
            self.assertIn("fig8_scan.csv", result.stdout)

    def test_scan_samples_override(self):
        with self.runner.isolated_filesystem():
            config = self.write("fig8.cfg", FIG8)
            result = self.runner.invoke(cli, ["scan", "--config", config, "--out", ".", "--samples", "25"])
            self.assertEqual(result.exit_code, 0, msg=result.output)
            lines = Path("fig8_scan.csv").read_text().splitlines()
            self.assertEqual(len([line for line in lines if not line.startswith("#")]), 26)

    def test_roots(self):
        with self.runner.isolated_filesystem():
            config = self.write("fig8.cfg", FIG8)
            result = self.runner.invoke(cli, ["roots", "--config", config])
            self.assertEqual(result.exit_code, 0, msg=result.output)
            lines = result.stdout.strip().splitlines()
            self.assertEqual(lines[0], "# relation: AntiSame")
            self.assertEqual(len(lines), 5)
            self.assertTrue(lines[1].endswith(",InverseSqrt"))

    def test_roots_k_max_override(self):
        with self.runner.isolated_filesystem():
            config = self.write("fig8.cfg", FIG8)
            result = self.runner.invoke(cli, ["roots", "--config", config, "--k-max", "4"])
            self.assertEqual(len(result.stdout.strip().splitlines()), 3)

    def test_classify(self):
        with self.runner.isolated_filesystem():
            config = self.write("delta.cfg", "L1_plus = 1\nL1_minus = 0\nL2_plus = 0.7\nL2_minus = 0.7\na = 2\n")
            result = self.runner.invoke(cli, ["classify", "--config", config])
            self.assertEqual(result.exit_code, 0, msg=result.output)
            self.assertEqual(result.stdout.splitlines(), ["j1: DiracDelta", "j2: Decoupling", "relation: None"])

    def test_preset(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["preset", "fig8", "--out", "figs"])
            self.assertEqual(result.exit_code, 0, msg=result.output)
            self.assertEqual(len(result.stdout.splitlines()), 3)
            self.assertTrue(Path("figs/fig8_roots.csv").exists())

    def test_unknown_preset(self):
        result = self.runner.invoke(cli, ["preset", "fig9"])
        self.assertEqual(result.exit_code, 2)

    def test_report(self):
        with self.runner.isolated_filesystem():
            config = self.write("fig8.cfg", FIG8)
            result = self.runner.invoke(cli, ["report", "--config", config])
            self.assertEqual(result.exit_code, 0, msg=result.output)
            self.assertIn("Relation: AntiSame", result.stdout)

    def test_parse_error_exit_code(self):
        with self.runner.isolated_filesystem():
            config = self.write("bad.cfg", "L1_plus = 1\nL1_minus = 0.5\ntheta1_plus = 1\n")
            result = self.runner.invoke(cli, ["scan", "--config", config])
            self.assertEqual(result.exit_code, PARSE_ERROR_EXIT)
            self.assertIn("error: line 3", result.stderr)

    def test_numeric_failure_exit_code(self):
        with self.runner.isolated_filesystem():
            config = self.write("fig8.cfg", FIG8)
            with patch("cli.run_scan", side_effect=NumericFailure("Non-finite transmission", k=1.5)):
                result = self.runner.invoke(cli, ["scan", "--config", config])
            self.assertEqual(result.exit_code, NUMERIC_ERROR_EXIT)
            self.assertIn("error: Non-finite transmission (k=1.5)", result.stderr)

    def test_missing_config_file(self):
        result = self.runner.invoke(cli, ["scan", "--config", "does-not-exist.cfg"])
        self.assertEqual(result.exit_code, 2)


if __name__ == "__main__":
    unittest.main()
