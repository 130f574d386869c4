"""
Evidence combination for evidassoc
Closed-form combination of per-pair mass triples over {Y1..Yn, *, Θ},
belief matrices in both directions, and max-of-belief decisions
"""

import logging
import math
from typing import Optional, Sequence, Tuple

from backend.errors import DimensionMismatchError, TotalConflictError
from backend.models import (
    BeliefMatrix, ColumnDecision, CombinedMassSet, DecisionPair, MassTriple, NaiveDecision,
)
from utils.config import TIE_TOLERANCE, TOTAL_CONFLICT_TOLERANCE

logger = logging.getLogger(__name__)


def combine_row(triples: Sequence[MassTriple]) -> CombinedMassSet:
    """
    Combine n pairwise triples into one mass set.

    u(Yj) = m_yes_j * prod_{k != j} (1 - m_yes_k)
    u(*)  = prod_j m_no_j
    u(Θ)  = prod_j (m_theta_j + m_no_j) - prod_j m_no_j
    then everything is scaled by K = 1 / (1 - conflict).
    """
    if not triples:
        raise ValueError("combine_row needs at least one mass triple")

    yes = [t.m_yes for t in triples]
    not_yes = [1.0 - y for y in yes]

    singles = []
    for j, y in enumerate(yes):
        singles.append(y * math.prod(not_yes[k] for k in range(len(yes)) if k != j))
    star = math.prod(t.m_no for t in triples)
    theta = max(0.0, math.prod(t.m_theta + t.m_no for t in triples) - star)

    unnormalised = math.fsum(singles) + star + theta
    conflict = 1.0 - unnormalised
    if conflict >= 1.0 - TOTAL_CONFLICT_TOLERANCE:
        certain = [j for j, y in enumerate(yes) if y >= 1.0]
        logger.error(f"Total conflict while combining {len(triples)} sources (certain matches: {certain})")
        raise TotalConflictError(
            f"contradictory certain evidence: candidates {certain} all have m_yes = 1"
        )

    k_norm = 1.0 / unnormalised
    return CombinedMassSet(
        singles=tuple(s * k_norm for s in singles),
        star=star * k_norm,
        theta=theta * k_norm,
        k_norm=k_norm,
        conflict=max(0.0, conflict),
    )


def build_belief_matrices(grid: Sequence[Sequence[MassTriple]],
                          n_known: Optional[int] = None) -> Tuple[BeliefMatrix, BeliefMatrix]:
    """
    Belief matrices from an n × m grid of triples (perceived along rows).

    The first has one column per perceived object over the known ones, the
    second one column per known object over the perceived ones. n_known is
    only needed when the grid has no rows.
    """
    n = len(grid)
    m = len(grid[0]) if n else (n_known or 0)
    if any(len(row) != m for row in grid):
        raise DimensionMismatchError("mass grid rows must all have the same length")
    if n_known is not None and n_known != m:
        raise DimensionMismatchError(f"mass grid has {m} columns but {n_known} known objects")

    if m:
        pk_columns = tuple(combine_row(grid[i]) for i in range(n))
    else:
        pk_columns = _related_to_nothing(n)
    if n:
        kp_columns = tuple(combine_row([grid[i][j] for i in range(n)]) for j in range(m))
    else:
        kp_columns = _related_to_nothing(m)

    logger.debug(f"Built belief matrices for {n} perceived x {m} known objects")
    return (
        BeliefMatrix(columns=pk_columns, orientation="perceived_to_known", n_candidates=m),
        BeliefMatrix(columns=kp_columns, orientation="known_to_perceived", n_candidates=n),
    )


def _related_to_nothing(n_sources: int) -> Tuple[CombinedMassSet, ...]:
    """Columns for sources that have no candidate at all"""
    column = CombinedMassSet(singles=(), star=1.0, theta=0.0, k_norm=1.0, conflict=0.0)
    return (column,) * n_sources


def _decide_column(column: CombinedMassSet) -> ColumnDecision:
    options = list(column.singles) + [column.star, column.theta]
    best = max(options)
    winners = [k for k, v in enumerate(options) if best - v <= TIE_TOLERANCE]
    n = len(column.singles)
    if len(winners) > 1:
        return ColumnDecision(
            kind="tie",
            candidates=tuple(w for w in winners if w < n),
            star_tied=n in winners,
            theta_tied=n + 1 in winners,
        )
    winner = winners[0]
    if winner == n:
        return ColumnDecision(kind="star")
    if winner == n + 1:
        return ColumnDecision(kind="theta")
    return ColumnDecision(kind="candidate", candidates=(winner,))


def naive_decisions(m1: BeliefMatrix, m2: BeliefMatrix) -> DecisionPair:
    """
    Max-of-belief decision on each column of both matrices.

    The two agree when they select the same relations, no object is claimed
    twice and every column settles on a single candidate or on '*'. A tie or a
    'Θ' choice leaves the association open.
    """
    if m1.n_sources != m2.n_candidates or m2.n_sources != m1.n_candidates:
        raise DimensionMismatchError("belief matrices were not built from the same grid")

    d1 = NaiveDecision(choices=tuple(_decide_column(c) for c in m1.columns), orientation=m1.orientation)
    d2 = NaiveDecision(choices=tuple(_decide_column(c) for c in m2.columns), orientation=m2.orientation)

    tied = any(c.kind == "tie" for c in d1.choices + d2.choices)
    ignorant = any(c.kind == "theta" for c in d1.choices + d2.choices)
    r1, r2 = d1.relations(), d2.relations()
    perceived = [i for i, _ in r1]
    known = [j for _, j in r1]
    one_to_one = len(set(perceived)) == len(perceived) and len(set(known)) == len(known)
    agreement = not tied and not ignorant and r1 == r2 and one_to_one

    if not agreement:
        logger.info(f"Naive decisions disagree (tied={tied}, ignorant={ignorant}, pk={sorted(r1)}, kp={sorted(r2)})")
    return DecisionPair(perceived=d1, known=d2, agreement=agreement)
