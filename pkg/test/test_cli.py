"""
End-to-end tests for the command-line front end and the report it writes
"""
import json
import sys
import tempfile
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import cli
from backend.report import dump_json, render_text
from backend.scenario import load_scenario
from utils.config import get_bundled_scenario_path

TOTAL_CONFLICT_SCENARIO = {
    "version": 1,
    "dimensionality": 1,
    "known": [
        {"label": "Y1", "quantity": {"support": [-2, 2], "core": [-0.5, 0.5]}},
        {"label": "Y2", "quantity": {"support": [8, 12], "core": [9.5, 10.5]}},
    ],
    "frames": [{
        "perceived": [{"label": "X1", "quantity": {"support": [-2, 2], "core": [-0.5, 0.5]}}],
        "mass_grid": [[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]],
    }],
}


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def run_cli(self, *argv):
        return cli.main(list(argv))

    def run_report(self, *argv):
        out = self.dir / "report.json"
        self.assertEqual(self.run_cli("run", *argv, "--output", str(out)), cli.EXIT_OK)
        return json.loads(out.read_text(encoding="utf-8"))


class TestRunCommand(CliTestCase):
    def test_worked_example_report(self):
        report = self.run_report("--scenario", "paper_section5.json")
        frame = report["frames"][0]
        self.assertAlmostEqual(frame["belief_matrix_pk"]["values"][0][0], 0.6545, delta=1e-4)
        self.assertAlmostEqual(frame["psi"], 0.2628, delta=1e-3)
        self.assertFalse(frame["via_shortcut"])
        self.assertEqual([(m["perceived"], m["known"]) for m in frame["matched"]], [("X1", "Y1"), ("X3", "Y2")])
        self.assertEqual(frame["appeared"], ["X2"])
        self.assertEqual(frame["disappeared"], ["Y3", "Y4"])
        self.assertEqual(frame["assignment"]["columns"], ["Y1", "Y2", "Y3", "Y4", "*"])
        self.assertEqual(frame["assignment"]["rows"], ["X1", "X2", "X3", "virtual-4"])
        self.assertEqual(frame["decisions"]["perceived_to_known"], ["Y1", "tie(Y1, Y2)", "Y2"])
        self.assertEqual(report["summary"]["tracks_alive"], 5)

    def test_belief_rows_sum_to_one(self):
        frame = self.run_report("--scenario", "paper_section5.json")["frames"][0]
        for key in ("belief_matrix_pk", "belief_matrix_kp"):
            for row in frame[key]["values"]:
                self.assertAlmostEqual(sum(row), 1.0, delta=1e-9)

    def test_text_format(self):
        out = self.dir / "report.txt"
        code = self.run_cli("run", "--scenario", "paper_section5.json", "--format", "text", "--output", str(out))
        self.assertEqual(code, cli.EXIT_OK)
        text = out.read_text(encoding="utf-8")
        self.assertIn("0.6545", text)
        self.assertIn("Psi: 0.2628", text)
        self.assertIn("Matched: (X1, Y1), (X3, Y2)", text)

    def test_output_is_deterministic(self):
        for name in ("paper_section5.json", "crossing_2d.json"):
            first, second = self.dir / "a.json", self.dir / "b.json"
            for out in (first, second):
                self.run_cli("run", "--scenario", name, "--output", str(out))
            self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_force_hungarian(self):
        quick = self.run_report("--scenario", "crossing_2d.json")
        forced = self.run_report("--scenario", "crossing_2d.json", "--force-hungarian")
        self.assertTrue(forced["force_hungarian"])
        self.assertEqual(forced["summary"]["frames_via_shortcut"], 0)
        for a, b in zip(quick["frames"], forced["frames"]):
            self.assertEqual(a["matched"], b["matched"])

    def test_frames_option_truncates(self):
        report = self.run_report("--scenario", "crossing_2d.json", "--frames", "2")
        self.assertEqual(report["summary"]["frames"], 2)

    def test_alpha0_override(self):
        report = self.run_report("--scenario", "crossing_2d.json", "--alpha0", "0.5")
        self.assertEqual(report["alpha0"], 0.5)

    def test_seeded_run(self):
        report = self.run_report("--seed", "4")
        self.assertEqual(report["scenario"], "random-walk-4")
        self.assertEqual(report["summary"]["frames"], 5)

    def test_markdown_log(self):
        log = self.dir / "logs" / "run.md"
        self.run_report("--scenario", "paper_section5.json", "--log-md", str(log))
        text = log.read_text(encoding="utf-8")
        self.assertIn("# Association Run", text)
        self.assertIn("Track spawned", text)
        self.assertIn("## 📊 Summary", text)


class TestExitCodes(CliTestCase):
    def test_total_conflict_exits_with_two(self):
        path = self.dir / "conflict.json"
        path.write_text(json.dumps(TOTAL_CONFLICT_SCENARIO), encoding="utf-8")
        self.assertEqual(self.run_cli("run", "--scenario", str(path)), cli.EXIT_TOTAL_CONFLICT)

    def test_missing_scenario(self):
        self.assertEqual(self.run_cli("run", "--scenario", str(self.dir / "absent.json")), cli.EXIT_USAGE)

    def test_invalid_scenario(self):
        path = self.dir / "bad.json"
        path.write_text(json.dumps({"version": 1, "dimensionality": 1, "alpha0": 1.2, "frames": []}),
                        encoding="utf-8")
        self.assertEqual(self.run_cli("run", "--scenario", str(path)), cli.EXIT_USAGE)

    def test_run_needs_an_input(self):
        self.assertEqual(self.run_cli("run"), cli.EXIT_USAGE)

    def test_usage_errors_exit_with_one(self):
        for argv in ([], ["run", "--format", "xml"], ["run", "--alpha0", "1.5"], ["generate"]):
            with self.assertRaises(SystemExit) as cm:
                self.run_cli(*argv)
            self.assertEqual(cm.exception.code, cli.EXIT_USAGE)


class TestGenerateCommand(CliTestCase):
    def test_generate_then_run(self):
        scenario_path = self.dir / "walk.json"
        code = self.run_cli("generate", "--seed", "7", "--objects", "2", "--frames", "3",
                            "--dimensionality", "2", "--output", str(scenario_path))
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(load_scenario(scenario_path).dimensionality, 2)
        report = self.run_report("--scenario", str(scenario_path))
        self.assertEqual(report["summary"]["frames"], 3)
        self.assertEqual(report["dimensionality"], 2)


class TestRunFunction(unittest.TestCase):
    def test_report_renders(self):
        scenario = load_scenario(get_bundled_scenario_path("paper_section5.json"))
        report = cli.run(scenario)
        self.assertTrue(dump_json(report).endswith("}\n"))
        text = render_text(report)
        self.assertIn("=== Frame 0 ===", text)
        self.assertIn("virtual-4", text)


if __name__ == "__main__":
    unittest.main()
