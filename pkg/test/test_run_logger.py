# Unit tests for the markdown run log
import sys
import tempfile
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from backend.run_logger import RunLogger

FRAME = {
    "index": 0,
    "via_shortcut": False,
    "matched": [{"perceived": "X1", "known": "Y1", "belief": 0.392727}],
    "appeared": ["X2"],
    "disappeared": ["Y3", "Y4"],
    "psi": 0.262777,
}


class TestRunLogger(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / "nested" / "run.md"
        self.logger = RunLogger(self.path)

    def read(self):
        return self.path.read_text(encoding="utf-8")

    def test_header(self):
        self.logger.initialize_log("demo", 1, 0.9, 4, 1, force_hungarian=True)
        text = self.read()
        self.assertTrue(text.startswith("# Association Run: demo\n"))
        self.assertIn("**Reliability (alpha0):** 0.9", text)
        self.assertIn("Hungarian forced", text)

    def test_frame_entry(self):
        self.logger.initialize_log("demo", 1, 0.9, 4, 1)
        self.logger.log_frame(FRAME)
        text = self.read()
        self.assertIn("### Frame 0 (Hungarian)", text)
        self.assertIn("- X1 ↔ Y1 *(belief 0.3927)*", text)
        self.assertIn("**Appeared:** X2", text)
        self.assertIn("**Disappeared:** Y3, Y4", text)
        self.assertIn("**Ψ:** 0.2628", text)

    def test_events_and_summary(self):
        self.logger.initialize_log("demo", 2, 0.9, 0, 0)
        self.logger.log_event("Track spawned", {"frame": 0, "id": 5})
        summary = {"frames": 1, "mean_psi": 0.5, "frames_via_shortcut": 1, "tracks_alive": 1}
        self.logger.log_final_results(summary, [{"id": 5, "label": "X2", "status": "tentative",
                                                 "hits": 1, "misses": 0}])
        text = self.read()
        self.assertIn("- id: 5", text)
        self.assertIn("Mean Ψ: **0.5000**", text)
        self.assertIn("| 5 | X2 | tentative | 1 | 0 |", text)


if __name__ == "__main__":
    unittest.main()
