"""
Run logging functionality for evidassoc
Handles creation and updating of markdown run logs
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

from utils.config import TEXT_DECIMALS


class RunLogger:
    """Handles logging of association runs to a markdown file"""

    def __init__(self, log_path: Union[str, Path]):
        self.log_path = Path(log_path)
        self._ensure_log_directory()

    def _ensure_log_directory(self):
        """Ensure the log directory exists"""
        self.log_path.parent.mkdir(parents=True, exist_ok=True)

    def initialize_log(self, scenario_name: str, dimensionality: int, alpha0: float,
                       n_known: int, n_frames: int, force_hungarian: bool = False):
        """Create the log file with the scenario header"""
        with open(self.log_path, 'w', encoding='utf-8') as f:
            f.write(f"# Association Run: {scenario_name}\n\n")
            f.write(f"**Started:** {datetime.now().isoformat(timespec='seconds')}\n")
            f.write(f"**Dimensionality:** {dimensionality}D\n")
            f.write(f"**Reliability (alpha0):** {alpha0}\n")
            f.write(f"**Initial known objects:** {n_known}\n")
            f.write(f"**Frames:** {n_frames}\n")
            if force_hungarian:
                f.write("**Shortcut:** disabled (Hungarian forced)\n")
            f.write("\n---\n\n## 🎯 Frames\n\n")

    def log_frame(self, frame: Dict):
        """Append one frame's decisions (a report frame entry)"""
        d = TEXT_DECIMALS
        with open(self.log_path, 'a', encoding='utf-8') as f:
            path = "naive agreement" if frame["via_shortcut"] else "Hungarian"
            f.write(f"### Frame {frame['index']} ({path})\n\n")
            if frame["matched"]:
                f.write("**Matched:**\n")
                for m in frame["matched"]:
                    f.write(f"- {m['perceived']} ↔ {m['known']} *(belief {m['belief']:.{d}f})*\n")
            if frame["appeared"]:
                f.write(f"**Appeared:** {', '.join(frame['appeared'])}\n")
            if frame["disappeared"]:
                f.write(f"**Disappeared:** {', '.join(frame['disappeared'])}\n")
            f.write(f"**Ψ:** {frame['psi']:.{d}f}\n\n")

    def log_event(self, event_type: str, data: Optional[Dict[str, Any]] = None):
        """Log a lifecycle event (spawn, deletion, failure)"""
        timestamp = datetime.now().strftime("%H:%M:%S")

        with open(self.log_path, 'a', encoding='utf-8') as f:
            f.write(f"#### ⚡ {event_type} ({timestamp})\n\n")
            if data:
                for key, value in data.items():
                    f.write(f"- {key}: {value}\n")
            f.write("\n")

    def log_final_results(self, summary: Dict, tracks: list):
        """Log the run summary and the surviving tracks"""
        d = TEXT_DECIMALS
        with open(self.log_path, 'a', encoding='utf-8') as f:
            f.write("---\n\n## 📊 Summary\n\n")
            f.write(f"- Frames: {summary['frames']}\n")
            f.write(f"- Mean Ψ: **{summary['mean_psi']:.{d}f}**\n")
            f.write(f"- Frames via shortcut: {summary['frames_via_shortcut']}\n")
            f.write(f"- Tracks alive: {summary['tracks_alive']}\n")

            if tracks:
                f.write("\n### Tracks\n\n")
                f.write("| id | label | status | hits | misses |\n")
                f.write("|----|-------|--------|------|--------|\n")
                for t in tracks:
                    f.write(f"| {t['id']} | {t['label']} | {t['status']} | {t['hits']} | {t['misses']} |\n")
