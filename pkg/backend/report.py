"""
Run reports for evidassoc
Builds the per-frame report (belief matrices, combined matrix, assignment with
the '*' column, Ψ, tracks) and renders it as JSON or aligned text
"""

import json
import math
from typing import Dict, List, Optional, Sequence

from backend.assignment import assignment_matrix
from backend.models import BeliefMatrix
from backend.tracker import FrameOutcome
from utils.config import REPORT_VERSION, TEXT_DECIMALS

STAR = "*"
THETA = "Θ"


def _belief_table(matrix: BeliefMatrix, row_labels: Sequence[str],
                  candidate_labels: Sequence[str]) -> Dict:
    """One row per source object: its singles, then '*' and Θ"""
    return {
        "rows": list(row_labels),
        "columns": list(candidate_labels) + [STAR, THETA],
        "values": [list(c.singles) + [c.star, c.theta] for c in matrix.columns],
        "k_norm": [c.k_norm for c in matrix.columns],
        "conflict": [c.conflict for c in matrix.columns],
    }


def perceived_labels(labels: Sequence[Optional[str]]) -> List[str]:
    return [label or f"P{i + 1}" for i, label in enumerate(labels)]


def frame_report(index: int, outcome: FrameOutcome, labels: Sequence[Optional[str]]) -> Dict:
    """Report entry for one tracking step"""
    trace, result = outcome.trace, outcome.result
    rows = perceived_labels(labels)
    cols = list(outcome.known_labels)
    virtual = [f"virtual-{i + 1}" for i in trace.padding.virtual_rows]

    decisions = trace.decisions
    return {
        "index": index,
        "perceived": rows,
        "known": cols,
        "belief_matrix_pk": _belief_table(trace.belief_pk, rows, cols),
        "belief_matrix_kp": _belief_table(trace.belief_kp, cols, rows),
        "decisions": {
            "perceived_to_known": [c.describe(cols) for c in decisions.perceived.choices],
            "known_to_perceived": [c.describe(rows) for c in decisions.known.choices],
            "agreement": decisions.agreement,
        },
        "combined": {
            "rows": rows,
            "columns": cols,
            "values": [list(r) for r in trace.combined.cells],
            "row_star": list(trace.combined.row_star),
            "col_star": list(trace.combined.col_star),
        },
        "solver_pairs": None if trace.solver_pairs is None else [list(p) for p in trace.solver_pairs],
        "assignment": {
            "rows": rows + virtual,
            "columns": cols + [STAR],
            "values": assignment_matrix(result, trace.padding),
        },
        "matched": [
            {"perceived": rows[i], "known": cols[j], "belief": trace.combined.cells[i][j]}
            for i, j in result.matched
        ],
        "appeared": [rows[i] for i in result.appeared],
        "disappeared": [cols[j] for j in result.disappeared],
        "psi": result.confidence,
        "via_shortcut": result.via_shortcut,
        "tracks": [t.to_report() for t in outcome.tracks],
        "spawned": list(outcome.spawned),
        "deleted": list(outcome.deleted),
    }


def build_report(scenario_name: str, dimensionality: int, alpha0: float,
                 frames: Sequence[Dict], force_hungarian: bool = False) -> Dict:
    """Whole-run report; frames are frame_report entries"""
    psis = [f["psi"] for f in frames]
    final_tracks = frames[-1]["tracks"] if frames else []
    return {
        "version": REPORT_VERSION,
        "scenario": scenario_name,
        "dimensionality": dimensionality,
        "alpha0": alpha0,
        "force_hungarian": force_hungarian,
        "frames": list(frames),
        "summary": {
            "frames": len(frames),
            "mean_psi": math.fsum(psis) / len(psis) if psis else 0.0,
            "frames_via_shortcut": sum(1 for f in frames if f["via_shortcut"]),
            "tracks_alive": len(final_tracks),
        },
    }


def dump_json(report: Dict) -> str:
    """Deterministic JSON text; identical reports give identical bytes"""
    return json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _fmt(value, decimals: int) -> str:
    if isinstance(value, bool) or isinstance(value, str):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:.{decimals}f}"


def _table(title: str, rows: Sequence[str], columns: Sequence[str],
           values: Sequence[Sequence], decimals: int) -> List[str]:
    cells = [[_fmt(v, decimals) for v in row] for row in values]
    first = max([len(r) for r in rows] + [1])
    widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(columns)]
    lines = [title]
    lines.append(" " * first + "  " + "  ".join(c.rjust(w) for c, w in zip(columns, widths)))
    for label, row in zip(rows, cells):
        lines.append(label.ljust(first) + "  " + "  ".join(v.rjust(w) for v, w in zip(row, widths)))
    return lines


def render_text(report: Dict, decimals: int = TEXT_DECIMALS) -> str:
    """Human-readable report with the same precision as the published tables"""
    lines = [
        f"Scenario: {report['scenario']} ({report['dimensionality']}D, alpha0={report['alpha0']})",
        "",
    ]
    for frame in report["frames"]:
        lines.append(f"=== Frame {frame['index']} ===")
        for key, title in (("belief_matrix_pk", "Belief matrix (perceived -> known)"),
                           ("belief_matrix_kp", "Belief matrix (known -> perceived)"),
                           ("combined", "Combined matrix"),
                           ("assignment", "Assignment")):
            table = frame[key]
            lines += _table(title, table["rows"], table["columns"], table["values"], decimals)
            lines.append("")

        decisions = frame["decisions"]
        lines.append(f"Naive decisions: {', '.join(decisions['perceived_to_known']) or '-'} | "
                     f"{', '.join(decisions['known_to_perceived']) or '-'} "
                     f"(agreement: {decisions['agreement']})")
        matched = ", ".join(f"({m['perceived']}, {m['known']})" for m in frame["matched"])
        lines.append(f"Matched: {matched or '-'}")
        lines.append(f"Appeared: {', '.join(frame['appeared']) or '-'}")
        lines.append(f"Disappeared: {', '.join(frame['disappeared']) or '-'}")
        lines.append(f"Psi: {frame['psi']:.{decimals}f}  via shortcut: {frame['via_shortcut']}")
        lines.append("Tracks:")
        for t in frame["tracks"]:
            lines.append(f"  #{t['id']} {t['label']:<8} {t['status']:<10} hits={t['hits']} misses={t['misses']}")
        lines.append("")

    summary = report["summary"]
    lines.append(
        f"Summary: {summary['frames']} frames, mean psi {summary['mean_psi']:.{decimals}f}, "
        f"{summary['frames_via_shortcut']} via shortcut, {summary['tracks_alive']} tracks alive"
    )
    return "\n".join(lines) + "\n"
