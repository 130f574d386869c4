"""
Fuzzy quantity operations for evidassoc
Intersection and similarity (concordance) index between perceived measurements
and known-object prediction windows
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from backend.errors import DimensionMismatchError, InvalidMeasurementError
from backend.models import FuzzyQuantity, FuzzyQuantity1D, FuzzyQuantity2D, SimilarityIndex
from utils.config import SIMILARITY_CLAMP_SLACK, SIMILARITY_GRID_CELLS

logger = logging.getLogger(__name__)

# (x0, v0, x1, v1): the min-membership is linear from (x0, v0) to (x1, v1)
Segment = Tuple[float, float, float, float]


def _piece_value(q: FuzzyQuantity1D, mid: float, x: float) -> float:
    """Value at x of the linear piece of q that contains mid"""
    if mid <= q.support_lo or mid >= q.support_hi:
        return 0.0
    if mid < q.core_lo:
        return q.height * (x - q.support_lo) / (q.core_lo - q.support_lo)
    if mid > q.core_hi:
        return q.height * (q.support_hi - x) / (q.support_hi - q.core_hi)
    return q.height


def _min_profile(a: FuzzyQuantity1D, b: FuzzyQuantity1D) -> List[Segment]:
    """Exact piecewise-linear min(μa, μb) over the overlap of the two supports"""
    lo = max(a.support_lo, b.support_lo)
    hi = min(a.support_hi, b.support_hi)
    if hi <= lo:
        return []

    knots = {lo, hi}
    for q in (a, b):
        knots.update(k for k in (q.core_lo, q.core_hi) if lo < k < hi)
    knots = sorted(knots)

    segments: List[Segment] = []
    for p, r in zip(knots[:-1], knots[1:]):
        mid = (p + r) / 2.0
        ap, ar = _piece_value(a, mid, p), _piece_value(a, mid, r)
        bp, br = _piece_value(b, mid, p), _piece_value(b, mid, r)
        dp, dr = ap - bp, ar - br
        if dp * dr < 0.0:
            # the two lines cross strictly inside (p, r)
            t = dp / (dp - dr)
            xc = p + t * (r - p)
            vc = ap + t * (ar - ap)
            segments.append((p, min(ap, bp), xc, vc))
            segments.append((xc, vc, r, min(ar, br)))
        else:
            segments.append((p, min(ap, bp), r, min(ar, br)))
    return segments


def _profile_area(segments: Sequence[Segment]) -> float:
    return float(sum((x1 - x0) * (v0 + v1) / 2.0 for x0, v0, x1, v1 in segments))


def intersection_area(a: FuzzyQuantity1D, b: FuzzyQuantity1D) -> float:
    """Exact area under min(μa, μb)"""
    return _profile_area(_min_profile(a, b))


def intersect_1d(a: FuzzyQuantity1D, b: FuzzyQuantity1D) -> Optional[FuzzyQuantity1D]:
    """
    Min-combination of two trapezoids, as its trapezoidal hull.

    Returns None when the supports are disjoint (or only touch). The hull is a
    convenience representation; use intersection_area for the exact area.
    """
    segments = [s for s in _min_profile(a, b) if s[1] > 0.0 or s[3] > 0.0]
    if not segments:
        return None

    height = max(max(v0, v1) for _, v0, _, v1 in segments)
    if height <= 0.0:
        return None
    tol = 1e-12 * height
    peaks = [x for x0, v0, x1, v1 in segments for x, v in ((x0, v0), (x1, v1)) if v >= height - tol]

    return FuzzyQuantity1D(
        support_lo=segments[0][0],
        support_hi=segments[-1][2],
        core_lo=min(peaks),
        core_hi=max(peaks),
        height=min(height, 1.0),
    )


def _clamp(raw: float, context: str) -> SimilarityIndex:
    assert -SIMILARITY_CLAMP_SLACK <= raw <= 1.0 + SIMILARITY_CLAMP_SLACK, (
        f"{context} similarity {raw!r} outside [0, 1]"
    )
    return SimilarityIndex(value=min(1.0, max(0.0, raw)))


def similarity_1d(perceived: FuzzyQuantity1D, known: FuzzyQuantity1D) -> SimilarityIndex:
    """area(perceived ∩ known) / area(perceived)"""
    area = perceived.area
    if area <= 0.0:
        raise InvalidMeasurementError(f"perceived quantity has zero area: {perceived.to_spec()}")
    raw = intersection_area(perceived, known) / area
    logger.debug(f"1D similarity {raw:.6f} (intersection over area {area:.6f})")
    return _clamp(raw, "1D")


def _axis_grid(lo: float, hi: float, cells: int) -> Tuple[np.ndarray, float]:
    step = (hi - lo) / cells
    return lo + step * (np.arange(cells) + 0.5), step


def _grid_volume(quantities: Sequence[FuzzyQuantity2D], x_range: Tuple[float, float],
                 y_range: Tuple[float, float], cells: int) -> float:
    """Midpoint-rule volume of the min-combination of the quantities over a box"""
    xs, dx = _axis_grid(*x_range, cells)
    ys, dy = _axis_grid(*y_range, cells)
    joint = quantities[0].membership(xs, ys)
    for q in quantities[1:]:
        joint = np.minimum(joint, q.membership(xs, ys))
    return float(joint.sum()) * dx * dy


def volume_2d(q: FuzzyQuantity2D, cells: int = SIMILARITY_GRID_CELLS) -> float:
    if q.degenerate:
        return 0.0
    return _grid_volume([q], (q.x.support_lo, q.x.support_hi),
                        (q.y.support_lo, q.y.support_hi), cells)


def similarity_2d(perceived: FuzzyQuantity2D, known: FuzzyQuantity2D,
                  cells: int = SIMILARITY_GRID_CELLS) -> SimilarityIndex:
    """
    volume(perceived ∩ known) / volume(perceived).

    Both volumes are integrated on a cells × cells midpoint grid fitted to their
    own domain: the perceived support box for the denominator, the overlap of
    the two support boxes for the numerator.
    """
    volume = volume_2d(perceived, cells)
    if volume <= 0.0:
        raise InvalidMeasurementError(f"perceived quantity has zero volume: {perceived.to_spec()}")

    x_range = (max(perceived.x.support_lo, known.x.support_lo),
               min(perceived.x.support_hi, known.x.support_hi))
    y_range = (max(perceived.y.support_lo, known.y.support_lo),
               min(perceived.y.support_hi, known.y.support_hi))
    if x_range[1] <= x_range[0] or y_range[1] <= y_range[0]:
        return SimilarityIndex(value=0.0)

    overlap = _grid_volume([perceived, known], x_range, y_range, cells)
    raw = overlap / volume
    logger.debug(f"2D similarity {raw:.6f} (overlap {overlap:.6f} / volume {volume:.6f})")
    return _clamp(raw, "2D")


def similarity(perceived: FuzzyQuantity, known: FuzzyQuantity) -> SimilarityIndex:
    """Similarity index for two quantities of the same dimensionality"""
    if perceived.dimensionality != known.dimensionality:
        raise DimensionMismatchError(
            f"cannot compare a {perceived.dimensionality}D measurement "
            f"with a {known.dimensionality}D prediction window"
        )
    if isinstance(perceived, FuzzyQuantity2D):
        return similarity_2d(perceived, known)
    return similarity_1d(perceived, known)


def similarity_grid(perceived: Sequence[FuzzyQuantity],
                    known: Sequence[FuzzyQuantity]) -> List[List[SimilarityIndex]]:
    """n × m similarity indices, perceived along rows"""
    dims = {q.dimensionality for q in list(perceived) + list(known)}
    if len(dims) > 1:
        raise DimensionMismatchError(f"mixed dimensionality in similarity grid: {sorted(dims)}")
    return [[similarity(p, k) for k in known] for p in perceived]
