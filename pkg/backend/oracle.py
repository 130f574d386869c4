"""
Brute-force reference implementations
Used by the test suite to check the closed-form combination and the assignment solver
"""

import itertools
import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from backend.errors import OracleLimitError, TotalConflictError
from backend.models import CombinedMassSet, MassTriple, Pair
from utils.config import TOTAL_CONFLICT_TOLERANCE

logger = logging.getLogger(__name__)

MAX_FRAME_CANDIDATES = 32
MAX_BRUTE_FORCE_SIZE = 8

# focal element bitset -> mass; bit j is Y_j, bit n is '*'
MassFunction = Dict[int, float]


def source_focal_elements(j: int, n: int, triple: MassTriple) -> MassFunction:
    """Source j: {Yj} -> m_yes, Ω minus {Yj} -> m_no, Ω -> m_theta"""
    omega = (1 << (n + 1)) - 1
    single = 1 << j
    return {single: triple.m_yes, omega & ~single: triple.m_no, omega: triple.m_theta}


def dempster_combine(m1: MassFunction, m2: MassFunction) -> Tuple[MassFunction, float]:
    """Dempster's rule: intersect focal sets, drop ∅, renormalise. Returns (m, K)"""
    combined: MassFunction = {}
    conflict = 0.0
    for a, ma in m1.items():
        for b, mb in m2.items():
            inter = a & b
            if inter == 0:
                conflict += ma * mb
            else:
                combined[inter] = combined.get(inter, 0.0) + ma * mb
    if conflict >= 1.0 - TOTAL_CONFLICT_TOLERANCE:
        raise TotalConflictError("sources are in total conflict")
    k = 1.0 / (1.0 - conflict)
    return {focal: mass * k for focal, mass in combined.items()}, k


def dempster_cascade(triples: Sequence[MassTriple]) -> CombinedMassSet:
    """
    Combine the sources in series, left to right, then project onto {Y1..Yn, *, Θ}.

    k_norm is the product of the per-step normalisers and conflict the matching
    overall conflict.
    """
    n = len(triples)
    if n < 1:
        raise ValueError("dempster_cascade needs at least one source")
    if n > MAX_FRAME_CANDIDATES:
        raise OracleLimitError(f"bitset frame limited to {MAX_FRAME_CANDIDATES} candidates")

    mass = source_focal_elements(0, n, triples[0])
    k_total = 1.0
    for j in range(1, n):
        mass, k = dempster_combine(mass, source_focal_elements(j, n, triples[j]))
        k_total *= k

    star_set = 1 << n
    singles = [mass.get(1 << j, 0.0) for j in range(n)]
    star = mass.get(star_set, 0.0)
    theta = math.fsum(v for focal, v in mass.items()
                      if focal != star_set and focal not in {1 << j for j in range(n)})
    return CombinedMassSet(
        singles=tuple(singles),
        star=star,
        theta=theta,
        k_norm=k_total,
        conflict=1.0 - 1.0 / k_total,
    )


def brute_force_assignment(costs) -> Tuple[float, List[Pair]]:
    """Best total belief over every permutation, and one permutation reaching it"""
    matrix = np.asarray(costs, dtype=float)
    size = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape[1] != size:
        raise ValueError(f"brute force needs a square matrix, got shape {matrix.shape}")
    if size > MAX_BRUTE_FORCE_SIZE:
        raise OracleLimitError(f"brute force limited to {MAX_BRUTE_FORCE_SIZE}x{MAX_BRUTE_FORCE_SIZE}")

    best_total = -math.inf
    best_pairs: List[Pair] = []
    for perm in itertools.permutations(range(size)):
        total = math.fsum(float(matrix[i, perm[i]]) for i in range(size))
        if total > best_total:
            best_total = total
            best_pairs = [(i, perm[i]) for i in range(size)]
    if size == 0:
        best_total = 0.0
    logger.debug(f"Brute force over {math.factorial(size)} permutations: best {best_total}")
    return best_total, best_pairs
