"""
Ambiguity removal for evidassoc
Combines the two belief matrices into a cost matrix, solves the assignment with
the Hungarian method, filters virtual and 'nothing'-dominated pairs, and scores Ψ
"""

import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from backend.combination import build_belief_matrices, naive_decisions
from backend.errors import DimensionMismatchError, NonSquareMatrixError
from backend.models import (
    Assignment, AssociationResult, AssociationTrace, BeliefMatrix, CombinedBeliefMatrix,
    MassTriple, Padding, Pair,
)

logger = logging.getLogger(__name__)


def combine_matrices(m1: BeliefMatrix, m2: BeliefMatrix) -> CombinedBeliefMatrix:
    """C_ij = m1[i].singles[j] * m2[j].singles[i]; the '*' masses ride along"""
    if m1.orientation != "perceived_to_known" or m2.orientation != "known_to_perceived":
        raise DimensionMismatchError("expected a perceived->known and a known->perceived matrix")
    if m1.n_sources != m2.n_candidates or m2.n_sources != m1.n_candidates:
        raise DimensionMismatchError(
            f"belief matrices disagree: {m1.n_sources}x{m1.n_candidates} "
            f"vs {m2.n_sources}x{m2.n_candidates}"
        )

    a = m1.singles()
    b = m2.singles()
    cells = a * b.T
    return CombinedBeliefMatrix(
        cells=tuple(tuple(float(c) for c in row) for row in cells),
        row_star=m1.stars(),
        col_star=m2.stars(),
    )


def pad_square(c: CombinedBeliefMatrix) -> Tuple[np.ndarray, Padding]:
    """Add zero-belief virtual rows or columns so every object can be coupled"""
    size = max(c.n_rows, c.n_cols)
    square = np.zeros((size, size), dtype=float)
    square[:c.n_rows, :c.n_cols] = c.as_array()
    padding = Padding(size=size, n_real_rows=c.n_rows, n_real_cols=c.n_cols)
    if size:
        logger.debug(
            f"Padded {c.n_rows}x{c.n_cols} to {size}x{size} "
            f"(virtual rows {padding.virtual_rows}, virtual columns {padding.virtual_cols})"
        )
    return square, padding


def _admissible_graph(reduced: List[List[Fraction]]) -> nx.Graph:
    """Bipartite graph of the zero cells, nodes inserted in index order"""
    size = len(reduced)
    graph = nx.Graph()
    graph.add_nodes_from((("row", i) for i in range(size)), bipartite=0)
    graph.add_nodes_from((("col", j) for j in range(size)), bipartite=1)
    graph.add_edges_from(
        (("row", i), ("col", j)) for i in range(size) for j in range(size) if reduced[i][j] == 0
    )
    return graph


def _is_perfect(graph: nx.Graph, rows: List[Tuple[str, int]]) -> bool:
    if not rows:
        return True
    coupling = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=rows)
    return len(coupling) // 2 == len(rows)


def _lowest_index_matching(graph: nx.Graph, size: int) -> Tuple[Pair, ...]:
    """
    Perfect matching of the zero graph taking, row by row, the lowest column
    that still leaves the remaining rows perfectly matchable.
    """
    remaining = graph.copy()
    pairs = []
    for i in range(size):
        row = ("row", i)
        rest = [("row", k) for k in range(i + 1, size)]
        for j in sorted(col for _, col in remaining.neighbors(row)):
            trial = remaining.copy()
            trial.remove_nodes_from([row, ("col", j)])
            if _is_perfect(trial, rest):
                pairs.append((i, j))
                remaining = trial
                break
        else:
            raise RuntimeError(f"row {i} lost its admissible cells")
    return tuple(pairs)


def hungarian_max(costs) -> Assignment:
    """
    Perfect matching of maximum total belief on a square matrix.

    Works on the complement 1 - C: rows then columns are reduced so each has a
    zero, a maximum coupling is sought among the zeros (admissible arcs), and
    while it is not perfect the Ford-Fulkerson marking (a minimum vertex cover
    of the zeros) gives the lines through which delta, the smallest uncovered
    residual, is moved to reveal new zeros.

    The residuals are exact fractions of the float beliefs, so a zero is a true
    zero. Among equal optima the lowest row takes the lowest column.
    """
    matrix = np.asarray(costs, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonSquareMatrixError(f"assignment needs a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("assignment costs must be finite")

    size = matrix.shape[0]
    if size == 0:
        return Assignment(pairs=(), padded_size=0)

    reduced = [[1 - Fraction(float(c)) for c in row] for row in matrix]
    for row in reduced:
        low = min(row)
        row[:] = [r - low for r in row]
    for j in range(size):
        low = min(row[j] for row in reduced)
        for row in reduced:
            row[j] -= low

    top = [("row", i) for i in range(size)]
    max_rounds = size ** 3 + 1
    for round_idx in range(max_rounds):
        graph = _admissible_graph(reduced)
        coupling = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
        if len(coupling) // 2 == size:
            pairs = _lowest_index_matching(graph, size)
            logger.debug(f"Hungarian solved {size}x{size} after {round_idx} delta updates")
            return Assignment(pairs=pairs, padded_size=size)

        cover = nx.bipartite.to_vertex_cover(graph, coupling, top_nodes=top)
        marked_rows = [("row", i) in cover for i in range(size)]
        marked_cols = [("col", j) in cover for j in range(size)]
        delta = min(
            reduced[i][j] for i in range(size) for j in range(size)
            if not marked_rows[i] and not marked_cols[j]
        )
        for i in range(size):
            for j in range(size):
                if not marked_rows[i] and not marked_cols[j]:
                    reduced[i][j] -= delta
                elif marked_rows[i] and marked_cols[j]:
                    reduced[i][j] += delta

    raise RuntimeError(f"Hungarian method did not converge on a {size}x{size} matrix")


def matching_total(costs, pairs: Sequence[Pair]) -> float:
    """Total belief of a matching, summed exactly so equal pair sets give equal totals"""
    matrix = np.asarray(costs, dtype=float)
    return math.fsum(float(matrix[i, j]) for i, j in sorted(pairs))


def filter_assignments(a: Assignment, c: CombinedBeliefMatrix,
                       provenance: Padding) -> AssociationResult:
    """
    Keep a pair only when both objects are real and C_ij beats every '*' mass
    on its row and column; everything else is an appearance or disappearance.
    """
    matched: List[Pair] = []
    appeared: List[int] = []
    disappeared: List[int] = []

    for i, j in a.pairs:
        virtual_i, virtual_j = provenance.is_virtual_row(i), provenance.is_virtual_col(j)
        if virtual_i and virtual_j:
            continue
        if virtual_i:
            disappeared.append(j)
            continue
        if virtual_j:
            appeared.append(i)
            continue

        belief = c.cells[i][j]
        threshold = max(c.row_star[i], c.col_star[j])
        if belief > threshold:
            matched.append((i, j))
        else:
            logger.info(f"Rejected pair ({i}, {j}): belief {belief:.4f} <= nothing {threshold:.4f}")
            appeared.append(i)
            disappeared.append(j)

    return AssociationResult(
        matched=tuple(sorted(matched)),
        appeared=tuple(sorted(appeared)),
        disappeared=tuple(sorted(disappeared)),
        n_perceived=c.n_rows,
        n_known=c.n_cols,
    )


def confidence(result: AssociationResult, c: CombinedBeliefMatrix) -> float:
    """Ψ: summed belief of the validated pairs over the largest possible coupling"""
    denominator = min(c.n_rows, c.n_cols)
    if denominator == 0:
        return 0.0
    psi = math.fsum(c.cells[i][j] for i, j in result.matched) / denominator
    return min(1.0, max(0.0, psi))



def _screen_relations(relations: set, c: CombinedBeliefMatrix) -> AssociationResult:
    """Agreeing max-of-belief relations, held to the same '*' criterion as solver pairs"""
    matched = []
    for i, j in sorted(relations):
        if c.cells[i][j] > max(c.row_star[i], c.col_star[j]):
            matched.append((i, j))
        else:
            logger.info(f"Shortcut pair ({i}, {j}) dominated by the '*' masses")
    rows = {i for i, _ in matched}
    cols = {j for _, j in matched}
    return AssociationResult(
        matched=tuple(matched),
        appeared=tuple(i for i in range(c.n_rows) if i not in rows),
        disappeared=tuple(j for j in range(c.n_cols) if j not in cols),
        via_shortcut=True,
        n_perceived=c.n_rows,
        n_known=c.n_cols,
    )


def associate_with_trace(grid: Sequence[Sequence[MassTriple]], n_known: Optional[int] = None,
                         force_hungarian: bool = False) -> Tuple[AssociationResult, AssociationTrace]:
    """
    Full association of n perceived objects with m known ones from their mass grid.

    When both max-of-belief decisions agree the Hungarian step is skipped
    (unless force_hungarian); Ψ is computed the same way on both paths.
    """
    m1, m2 = build_belief_matrices(grid, n_known=n_known)
    decisions = naive_decisions(m1, m2)
    combined = combine_matrices(m1, m2)
    square, padding = pad_square(combined)

    solver_pairs = None
    if decisions.agreement and not force_hungarian:
        result = _screen_relations(decisions.perceived.relations(), combined)
    else:
        assignment = hungarian_max(square)
        solver_pairs = assignment.pairs
        result = filter_assignments(assignment, combined, padding)

    result = result.model_copy(update={"confidence": confidence(result, combined)})
    logger.info(
        f"Associated {combined.n_rows} perceived with {combined.n_cols} known: "
        f"matched={list(result.matched)} appeared={list(result.appeared)} "
        f"disappeared={list(result.disappeared)} psi={result.confidence:.4f} "
        f"shortcut={result.via_shortcut}"
    )
    trace = AssociationTrace(
        belief_pk=m1, belief_kp=m2, decisions=decisions, combined=combined,
        padding=padding, solver_pairs=solver_pairs,
    )
    return result, trace


def associate(grid: Sequence[Sequence[MassTriple]], n_known: Optional[int] = None,
              force_hungarian: bool = False) -> AssociationResult:
    result, _ = associate_with_trace(grid, n_known=n_known, force_hungarian=force_hungarian)
    return result


def assignment_matrix(result: AssociationResult, padding: Padding) -> List[List[int]]:
    """
    Final 0/1 decision matrix: one row per padded perceived object, one column
    per real known object plus a last '*' column for "associated with nothing".
    """
    n_rows = max(padding.size, result.n_perceived)
    rows = [[0] * (result.n_known + 1) for _ in range(n_rows)]
    matched_rows = set()
    for i, j in result.matched:
        rows[i][j] = 1
        matched_rows.add(i)
    for i in range(n_rows):
        if i not in matched_rows:
            rows[i][result.n_known] = 1
    return rows
