#!/usr/bin/env python3
"""
Tests for scenario parsing, scans, CSV emission, presets and reports.
"""

import csv
import math
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import config as settings
from junction import BoundaryTag, classify_junction, junction_from_lengths
from resonance import resonance_roots_case_i
from scattering_double import DoubleConfig, t2
from scenarios import (
    PRESETS,
    NumericFailure,
    OutputKind,
    ParseError,
    ScanMode,
    emit_report,
    format_scan_csv,
    parse_scenario,
    read_scan_csv,
    run_preset,
    run_scan,
    write_scan_csv,
)

FIG7 = """
# symmetric double barrier
mode = double
L1_plus = 1.0
L1_minus = 0.5
L2_plus = 1.0
L2_minus = 0.5
a = 1.0
"""

FIG8 = """
L1_plus = 2
L1_minus = -1
L2_plus = -2   # anti-symmetric partner
L2_minus = 1
a = 1
"""


class TestParseScenario(unittest.TestCase):
    """Unit tests for the key = value scenario format"""

    def test_minimal_double(self):
        scenario = parse_scenario(FIG8)
        self.assertEqual(scenario.mode, ScanMode.DOUBLE)
        self.assertEqual(len(scenario.junctions), 2)
        self.assertEqual(scenario.a, 1.0)
        self.assertEqual(scenario.junctions[1].l_plus.value, -2.0)

    def test_defaults(self):
        scenario = parse_scenario(FIG7)
        self.assertEqual(scenario.k_min, settings.DEFAULT_K_MIN)
        self.assertEqual(scenario.k_max, settings.DEFAULT_K_MAX)
        self.assertEqual(scenario.samples, settings.DEFAULT_SAMPLES)
        self.assertEqual(scenario.outputs, [OutputKind.CSV, OutputKind.PLOTSCRIPT])

    def test_free_junction(self):
        scenario = parse_scenario('L1_plus = "inf"\nL1_minus = 0\n')
        self.assertEqual(scenario.mode, ScanMode.SINGLE)
        self.assertEqual(classify_junction(scenario.junctions[0]).tag, BoundaryTag.FREE)

    def test_angle_keys(self):
        scenario = parse_scenario(f"theta1_plus = {math.pi / 2}\ntheta1_minus = {math.pi}\n")
        self.assertAlmostEqual(scenario.junctions[0].l_plus.value, 1.0, places=12)
        self.assertTrue(scenario.junctions[0].l_minus.is_zero())

    def test_length_angle_exclusivity(self):
        with self.assertRaises(ParseError) as context:
            parse_scenario("L1_plus = 1\nL1_minus = 0.5\ntheta1_plus = 1.0\ntheta1_minus = 1.0\n")
        self.assertEqual(context.exception.line, 3)
        self.assertEqual(context.exception.column, 1)

    def test_angle_first_conflict(self):
        with self.assertRaises(ParseError) as context:
            parse_scenario("theta1_plus = 1.0\ntheta1_minus = 1.0\n  L1_plus = 1\nL1_minus = 0.5\n")
        self.assertEqual((context.exception.line, context.exception.column), (3, 3))

    def test_bad_length_reported_at_its_own_line(self):
        with self.assertRaises(ParseError) as context:
            parse_scenario("L1_plus = 1\nL1_minus = abc\n")
        self.assertEqual((context.exception.line, context.exception.column), (2, 12))
        self.assertIn("abc", str(context.exception))

    def test_unknown_key(self):
        with self.assertRaises(ParseError) as context:
            parse_scenario("L1_plus = 1\n  foo = 2\n")
        self.assertEqual((context.exception.line, context.exception.column), (2, 3))
        self.assertIn("line 2, column 3", str(context.exception))

    def test_non_numeric_value(self):
        with self.assertRaises(ParseError) as context:
            parse_scenario(FIG8.replace("a = 1", "a = abc"))
        self.assertEqual(context.exception.column, 5)

    def test_non_numeric_length(self):
        with self.assertRaises(ParseError) as context:
            parse_scenario("L1_plus = wide\nL1_minus = 0\n")
        self.assertEqual(context.exception.line, 1)

    def test_duplicate_and_malformed_lines(self):
        with self.assertRaises(ParseError):
            parse_scenario("L1_plus = 1\nL1_plus = 2\nL1_minus = 0\n")
        with self.assertRaises(ParseError):
            parse_scenario("L1_plus 1\n")

    def test_missing_partner_key(self):
        with self.assertRaises(ParseError):
            parse_scenario("L1_plus = 1\n")

    def test_double_needs_separation(self):
        with self.assertRaises(ParseError) as context:
            parse_scenario(FIG8.replace("a = 1", ""))
        self.assertEqual(context.exception.line, 0)

    def test_invalid_range(self):
        with self.assertRaises(ParseError):
            parse_scenario(FIG8 + "k_min = 5\nk_max = 2\n")
        with self.assertRaises(ParseError):
            parse_scenario(FIG8 + "samples = 1\n")

    def test_overrides(self):
        scenario = parse_scenario(FIG8 + "k_max = 4\n", overrides={"k_max": 12.0, "samples": None})
        self.assertEqual(scenario.k_max, 12.0)
        self.assertEqual(scenario.samples, settings.DEFAULT_SAMPLES)

    def test_outputs_and_residuals(self):
        scenario = parse_scenario(FIG8 + "outputs = report, csv\nresiduals = yes\n")
        self.assertEqual(scenario.outputs, [OutputKind.CSV, OutputKind.REPORT])
        self.assertTrue(scenario.residuals)


class TestRunScan(unittest.TestCase):
    """Unit tests for uniform transmission scans"""

    def window_max(self, table, k, half_width):
        ks, values = table.column("k"), table.column("T")
        return values[np.abs(ks - k) <= half_width].max()

    def test_fig8_maxima(self):
        table = run_scan(parse_scenario(FIG8))
        self.assertEqual(len(table.rows), 2000)
        for k in (1 / math.sqrt(2), math.pi, 2 * math.pi, 3 * math.pi):
            self.assertGreater(self.window_max(table, k, 0.01), 0.9)

    def test_fig7_maxima_at_case_i_roots(self):
        table = run_scan(parse_scenario(FIG7, overrides={"samples": 20000}))
        roots = resonance_roots_case_i(junction_from_lengths(1.0, 0.5), 1.0, 10.0)
        self.assertGreater(len(roots), 0)
        for root in roots:
            self.assertGreater(self.window_max(table, root.k, 1e-3), 0.9)

    def test_single_mode(self):
        scenario = parse_scenario("L1_plus = 1.0\nL1_minus = 0.5\nk_max = 5\nsamples = 11\n")
        table = run_scan(scenario)
        self.assertEqual(table.columns, ["k", "T"])
        ks, values = table.column("k"), table.column("T")
        self.assertEqual(ks[0], settings.DEFAULT_K_MIN)
        self.assertEqual(ks[-1], 5.0)
        self.assertTrue(np.all((values >= 0.0) & (values <= 1.0)))

    def test_residual_columns(self):
        table = run_scan(parse_scenario(FIG8 + "residuals = true\nsamples = 50\n"))
        self.assertEqual(table.columns, ["k", "T", "r1", "r2"])

    def test_numeric_failure_reports_k(self):
        with patch("scenarios.double_transmission_grid",
                   side_effect=lambda config, ks: np.where(ks > 5.0, np.nan, 0.5)):
            with self.assertRaises(NumericFailure) as context:
                run_scan(parse_scenario(FIG8))
        self.assertGreater(context.exception.k, 5.0)


class TestCsvEmission(unittest.TestCase):
    """Unit tests for CSV writing and reading"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip_exact(self):
        table = run_scan(parse_scenario(FIG8 + "residuals = true\n"))
        path = write_scan_csv(table, self.out / "fig8.csv")
        recovered = read_scan_csv(path)
        self.assertEqual(recovered.columns, table.columns)
        self.assertEqual(recovered.metadata, table.metadata)
        self.assertEqual(recovered.rows, table.rows)

    def test_format(self):
        text = format_scan_csv(run_scan(parse_scenario(FIG8 + "samples = 3\n")))
        lines = text.split("\n")
        self.assertTrue(lines[0].startswith("# tool_version: "))
        self.assertIn("k,T", lines)
        self.assertNotIn("\r", text)
        self.assertTrue(text.endswith("\n"))

    def test_deterministic(self):
        scenario_text = FIG7 + "samples = 500\n"
        first = format_scan_csv(run_scan(parse_scenario(scenario_text)))
        second = format_scan_csv(run_scan(parse_scenario(scenario_text)))
        self.assertEqual(first, second)


class TestPresets(unittest.TestCase):
    """Unit tests for the reference-figure presets"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def read_roots(self, path):
        with open(path, newline="") as f:
            return list(csv.DictReader(f))

    def test_all_presets(self):
        """Test every preset runs and every emitted root re-evaluates to T2 = 1"""
        for name, preset in PRESETS.items():
            with self.subTest(preset=name):
                paths = run_preset(name, self.out)
                self.assertEqual([p.name for p in paths], [f"{name}_curves.csv", f"{name}_roots.csv", f"{name}.gp"])
                for path in paths:
                    self.assertTrue(path.exists())

                j1 = junction_from_lengths(*preset.j1)
                j2 = junction_from_lengths(*preset.j2) if preset.j2 else j1
                config = DoubleConfig(j1=j1, j2=j2, a=preset.a)
                roots = self.read_roots(paths[1])
                self.assertGreater(len(roots), 0)
                for row in roots:
                    self.assertGreaterEqual(t2(config, float(row["k"])), 1.0 - 1e-8)

    def test_fig3_pole(self):
        """Test f(k) is blanked around its pole at √2"""
        run_preset("fig3", self.out)
        table = read_scan_csv(self.out / "fig3_curves.csv")
        ks, f = table.column("k"), table.column("f_k")
        near_pole = np.abs(ks - math.sqrt(2)) < 0.005
        self.assertTrue(np.any(near_pole))
        self.assertTrue(np.all(np.isnan(f[near_pole])))
        self.assertEqual(table.columns, ["k", "tan_ka", "f_k"])

    def test_fig7_roots_match_solver(self):
        run_preset("fig7", self.out)
        roots = self.read_roots(self.out / "fig7_roots.csv")
        expected = resonance_roots_case_i(junction_from_lengths(1.0, 0.5), 1.0, PRESETS["fig7"].k_max)
        self.assertEqual([float(row["k"]) for row in roots], [root.k for root in expected])

    def test_fig8_first_root(self):
        run_preset("fig8", self.out)
        roots = self.read_roots(self.out / "fig8_roots.csv")
        self.assertAlmostEqual(float(roots[0]["k"]), 1 / math.sqrt(2), places=12)
        self.assertEqual(roots[0]["kind"], "InverseSqrt")
        self.assertEqual(len(roots), 4)

    def test_fig7_deterministic(self):
        first, second = self.out / "first", self.out / "second"
        run_preset("fig7", first)
        run_preset("fig7", second)
        for name in ("fig7_curves.csv", "fig7_roots.csv", "fig7.gp"):
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())

    def test_plot_script_references_csv(self):
        run_preset("fig8", self.out)
        script = (self.out / "fig8.gp").read_text()
        self.assertIn('"fig8_curves.csv"', script)
        self.assertIn("using 1:2", script)
        self.assertIn("using 1:3", script)


class TestEmitReport(unittest.TestCase):
    """Unit tests for the text report"""

    def test_delta_case(self):
        text = emit_report(parse_scenario("L1_plus = 1\nL1_minus = 0\nL2_plus = 0\nL2_minus = 1\na = 1\n"))
        self.assertIn("class=DiracDelta", text)
        self.assertIn("Delta-potential case (III)", text)

    def test_fig7_report(self):
        text = emit_report(parse_scenario(FIG7))
        self.assertIn("Relation: SymmetricSame", text)
        self.assertIn("Root family: infinite", text)

    def test_fig8_peak_widths(self):
        text = emit_report(parse_scenario(FIG8))
        self.assertIn("Relation: AntiSame", text)
        self.assertIn("peak n=3", text)

    def test_generic_report(self):
        text = emit_report(parse_scenario("L1_plus = 1\nL1_minus = -0.5\nL2_plus = 2\nL2_minus = 0.3\na = 1\n"))
        self.assertIn("Relation: None", text)
        self.assertIn("Incidental candidate", text)

    def test_single_report(self):
        text = emit_report(parse_scenario("L1_plus = 2\nL1_minus = -1\n"))
        self.assertIn("Perfect transmission: k=0.7071067811865", text)


if __name__ == "__main__":
    unittest.main()
