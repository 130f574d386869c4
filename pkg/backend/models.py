"""
Data models for evidassoc
Contains the pydantic domain types shared by the association pipeline
"""

from __future__ import annotations

import math
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from utils.config import COLUMN_SUM_TOLERANCE, MASS_SUM_TOLERANCE

Pair = Tuple[int, int]


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


# ────────────────────────────────────────────────────────────────────────────
# Fuzzy quantities
# ────────────────────────────────────────────────────────────────────────────

class FuzzyQuantity1D(_Frozen):
    """Trapezoidal possibility distribution: support is the imprecision, height the certainty"""
    support_lo: float
    support_hi: float
    core_lo: float
    core_hi: float
    height: float = Field(default=1.0, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_order(self) -> "FuzzyQuantity1D":
        values = (self.support_lo, self.core_lo, self.core_hi, self.support_hi)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("trapezoid bounds must be finite")
        if not self.support_lo <= self.core_lo <= self.core_hi <= self.support_hi:
            raise ValueError(
                f"expected support_lo <= core_lo <= core_hi <= support_hi, got {values}"
            )
        return self

    @classmethod
    def trapezoid(cls, support: Tuple[float, float], core: Tuple[float, float],
                  height: float = 1.0) -> "FuzzyQuantity1D":
        return cls(support_lo=support[0], support_hi=support[1],
                   core_lo=core[0], core_hi=core[1], height=height)

    @classmethod
    def from_spec(cls, spec: Dict) -> "FuzzyQuantity1D":
        """Build from the scenario-file form {support: [lo, hi], core: [lo, hi], height: h}"""
        return cls.trapezoid(tuple(spec["support"]), tuple(spec["core"]), spec.get("height", 1.0))

    def to_spec(self) -> Dict:
        return {
            "support": [self.support_lo, self.support_hi],
            "core": [self.core_lo, self.core_hi],
            "height": self.height,
        }

    @property
    def dimensionality(self) -> int:
        return 1

    @property
    def support_width(self) -> float:
        return self.support_hi - self.support_lo

    @property
    def core_width(self) -> float:
        return self.core_hi - self.core_lo

    @property
    def core_center(self) -> float:
        return (self.core_lo + self.core_hi) / 2.0

    @property
    def area(self) -> float:
        return (self.support_width + self.core_width) * self.height / 2.0

    def shape(self, xs) -> np.ndarray:
        """Unit-height trapezoid evaluated at xs (vectorised)"""
        x = np.asarray(xs, dtype=float)
        out = np.zeros_like(x)
        out[(x >= self.core_lo) & (x <= self.core_hi)] = 1.0
        if self.core_lo > self.support_lo:
            rising = (x > self.support_lo) & (x < self.core_lo)
            out[rising] = (x[rising] - self.support_lo) / (self.core_lo - self.support_lo)
        if self.support_hi > self.core_hi:
            falling = (x > self.core_hi) & (x < self.support_hi)
            out[falling] = (self.support_hi - x[falling]) / (self.support_hi - self.core_hi)
        return out

    def membership(self, xs) -> np.ndarray:
        return self.height * self.shape(xs)

    def translated(self, offset: float) -> "FuzzyQuantity1D":
        return FuzzyQuantity1D(
            support_lo=self.support_lo + offset, support_hi=self.support_hi + offset,
            core_lo=self.core_lo + offset, core_hi=self.core_hi + offset, height=self.height,
        )

    def widened(self, factor: float) -> "FuzzyQuantity1D":
        """Scale the support about the core center; the core is left untouched"""
        center = self.core_center
        return self.model_copy(update={
            "support_lo": min(center - (center - self.support_lo) * factor, self.core_lo),
            "support_hi": max(center + (self.support_hi - center) * factor, self.core_hi),
        })

    def with_height(self, height: float) -> "FuzzyQuantity1D":
        return FuzzyQuantity1D(
            support_lo=self.support_lo, support_hi=self.support_hi,
            core_lo=self.core_lo, core_hi=self.core_hi, height=height,
        )


class FuzzyQuantity2D(_Frozen):
    """Product of two trapezoids; joint membership is height * min(shape_x, shape_y)"""
    x: FuzzyQuantity1D
    y: FuzzyQuantity1D
    height: float = Field(default=1.0, gt=0.0, le=1.0)

    @classmethod
    def from_spec(cls, spec: Dict) -> "FuzzyQuantity2D":
        return cls(
            x=FuzzyQuantity1D.from_spec(spec["x"]),
            y=FuzzyQuantity1D.from_spec(spec["y"]),
            height=spec.get("height", 1.0),
        )

    def to_spec(self) -> Dict:
        return {"x": self.x.to_spec(), "y": self.y.to_spec(), "height": self.height}

    @property
    def dimensionality(self) -> int:
        return 2

    @property
    def degenerate(self) -> bool:
        return self.x.support_width <= 0.0 or self.y.support_width <= 0.0

    def membership(self, xs, ys) -> np.ndarray:
        """Joint membership on the grid xs × ys (rows follow xs)"""
        sx = self.x.shape(xs)
        sy = self.y.shape(ys)
        return self.height * np.minimum(sx[:, None], sy[None, :])

    def translated(self, dx: float, dy: float) -> "FuzzyQuantity2D":
        return self.model_copy(update={"x": self.x.translated(dx), "y": self.y.translated(dy)})

    def widened(self, factor: float) -> "FuzzyQuantity2D":
        return self.model_copy(update={"x": self.x.widened(factor), "y": self.y.widened(factor)})

    def with_height(self, height: float) -> "FuzzyQuantity2D":
        return FuzzyQuantity2D(x=self.x, y=self.y, height=height)


FuzzyQuantity = Union[FuzzyQuantity1D, FuzzyQuantity2D]


def quantity_from_spec(spec: Dict) -> FuzzyQuantity:
    """Parse a scenario-file fuzzy quantity; 2D quantities nest x/y"""
    if "x" in spec:
        return FuzzyQuantity2D.from_spec(spec)
    return FuzzyQuantity1D.from_spec(spec)


class SimilarityIndex(_Frozen):
    """Normalised overlap of a perceived quantity with a known one"""
    value: float = Field(ge=0.0, le=1.0)

    def __float__(self) -> float:
        return self.value


# ────────────────────────────────────────────────────────────────────────────
# Masses
# ────────────────────────────────────────────────────────────────────────────

class Reliability(_Frozen):
    """Source reliability coefficient alpha0"""
    alpha0: float = Field(ge=0.0, le=1.0)


class MassTriple(_Frozen):
    """Basic belief assignment for one (perceived, known) pair"""
    m_yes: float = Field(ge=0.0, le=1.0)
    m_no: float = Field(ge=0.0, le=1.0)
    m_theta: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_sum(self) -> "MassTriple":
        total = self.m_yes + self.m_no + self.m_theta
        if abs(total - 1.0) > MASS_SUM_TOLERANCE:
            raise ValueError(f"mass triple must sum to 1, got {total!r}")
        return self

    @classmethod
    def of(cls, m_yes: float, m_no: float, m_theta: float) -> "MassTriple":
        return cls(m_yes=m_yes, m_no=m_no, m_theta=m_theta)

    def as_list(self) -> List[float]:
        return [self.m_yes, self.m_no, self.m_theta]


class CombinedMassSet(_Frozen):
    """One column of a belief matrix: masses over {Y1..Yn, *, Θ} and the normaliser K"""
    singles: Tuple[float, ...]
    star: float = Field(ge=0.0)
    theta: float = Field(ge=0.0)
    k_norm: float = Field(gt=0.0)
    conflict: float = Field(ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_masses(self) -> "CombinedMassSet":
        if any(s < 0.0 for s in self.singles):
            raise ValueError("singleton masses must be non-negative")
        total = math.fsum(self.singles) + self.star + self.theta
        if abs(total - 1.0) > COLUMN_SUM_TOLERANCE:
            raise ValueError(f"combined masses must sum to 1, got {total!r}")
        if abs(1.0 / self.k_norm - (1.0 - self.conflict)) > COLUMN_SUM_TOLERANCE:
            raise ValueError("k_norm must equal 1 / (1 - conflict)")
        return self

    def total(self) -> float:
        return math.fsum(self.singles) + self.star + self.theta


Orientation = Literal["perceived_to_known", "known_to_perceived"]


class BeliefMatrix(_Frozen):
    """Combined mass sets, one column per source object"""
    columns: Tuple[CombinedMassSet, ...]
    orientation: Orientation
    n_candidates: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_columns(self) -> "BeliefMatrix":
        for idx, column in enumerate(self.columns):
            if len(column.singles) != self.n_candidates:
                raise ValueError(
                    f"column {idx} has {len(column.singles)} singles, expected {self.n_candidates}"
                )
        return self

    @property
    def n_sources(self) -> int:
        return len(self.columns)

    def singles(self) -> np.ndarray:
        """Singleton masses as an (n_sources × n_candidates) array"""
        if not self.columns:
            return np.zeros((0, self.n_candidates))
        return np.array([c.singles for c in self.columns], dtype=float).reshape(
            self.n_sources, self.n_candidates
        )

    def stars(self) -> Tuple[float, ...]:
        return tuple(c.star for c in self.columns)


class ColumnDecision(_Frozen):
    """Max-of-belief choice for one column: a candidate, '*', 'Θ' or a tie"""
    kind: Literal["candidate", "star", "theta", "tie"]
    candidates: Tuple[int, ...] = ()
    # a tie may also involve the '*' and 'Θ' masses
    star_tied: bool = False
    theta_tied: bool = False

    def describe(self, candidate_labels: List[str]) -> str:
        if self.kind == "star":
            return "*"
        if self.kind == "theta":
            return "Θ"
        names = [candidate_labels[c] for c in self.candidates]
        if self.kind == "tie":
            if self.star_tied:
                names.append("*")
            if self.theta_tied:
                names.append("Θ")
            return "tie(" + ", ".join(names) + ")"
        return names[0]


class NaiveDecision(_Frozen):
    choices: Tuple[ColumnDecision, ...]
    orientation: Orientation

    def relations(self) -> set:
        """(perceived, known) pairs selected by the unambiguous candidate choices"""
        pairs = set()
        for source, choice in enumerate(self.choices):
            if choice.kind != "candidate":
                continue
            target = choice.candidates[0]
            if self.orientation == "perceived_to_known":
                pairs.add((source, target))
            else:
                pairs.add((target, source))
        return pairs


class DecisionPair(_Frozen):
    perceived: NaiveDecision
    known: NaiveDecision
    agreement: bool


# ────────────────────────────────────────────────────────────────────────────
# Assignment
# ────────────────────────────────────────────────────────────────────────────

class CombinedBeliefMatrix(_Frozen):
    """Conjunction of both belief matrices, plus the '*' masses of each side"""
    cells: Tuple[Tuple[float, ...], ...]
    row_star: Tuple[float, ...]
    col_star: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "CombinedBeliefMatrix":
        if len(self.cells) != len(self.row_star):
            raise ValueError("one row_star entry per row expected")
        for row in self.cells:
            if len(row) != len(self.col_star):
                raise ValueError("one col_star entry per column expected")
            if any(not 0.0 <= c <= 1.0 for c in row):
                raise ValueError("combined beliefs must lie in [0, 1]")
        return self

    @property
    def n_rows(self) -> int:
        return len(self.row_star)

    @property
    def n_cols(self) -> int:
        return len(self.col_star)

    def as_array(self) -> np.ndarray:
        return np.array(self.cells, dtype=float).reshape(self.n_rows, self.n_cols)


class Padding(_Frozen):
    """Provenance of a padded square matrix: indices at or past n_real_* are virtual"""
    size: int = Field(ge=0)
    n_real_rows: int = Field(ge=0)
    n_real_cols: int = Field(ge=0)

    def is_virtual_row(self, i: int) -> bool:
        return i >= self.n_real_rows

    def is_virtual_col(self, j: int) -> bool:
        return j >= self.n_real_cols

    @property
    def virtual_rows(self) -> Tuple[int, ...]:
        return tuple(range(self.n_real_rows, self.size))

    @property
    def virtual_cols(self) -> Tuple[int, ...]:
        return tuple(range(self.n_real_cols, self.size))


class Assignment(_Frozen):
    """Perfect matching on the padded square matrix"""
    pairs: Tuple[Pair, ...]
    padded_size: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_perfect(self) -> "Assignment":
        rows = sorted(i for i, _ in self.pairs)
        cols = sorted(j for _, j in self.pairs)
        expected = list(range(self.padded_size))
        if rows != expected or cols != expected:
            raise ValueError("assignment must use every row and column exactly once")
        return self

    def column_of(self, row: int) -> int:
        return dict(self.pairs)[row]


class AssociationResult(_Frozen):
    """Validated pairs, appearances, disappearances and the decision confidence Ψ"""
    matched: Tuple[Pair, ...]
    appeared: Tuple[int, ...]
    disappeared: Tuple[int, ...]
    confidence: float = Field(default=0.0, ge=0.0, le=1.0)
    via_shortcut: bool = False
    n_perceived: int = Field(ge=0)
    n_known: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_partition(self) -> "AssociationResult":
        perceived = [i for i, _ in self.matched] + list(self.appeared)
        known = [j for _, j in self.matched] + list(self.disappeared)
        if sorted(perceived) != list(range(self.n_perceived)):
            raise ValueError("matched and appeared must partition the perceived objects")
        if sorted(known) != list(range(self.n_known)):
            raise ValueError("matched and disappeared must partition the known objects")
        return self

    def matched_set(self) -> set:
        return set(self.matched)


class AssociationTrace(_Frozen):
    """Intermediate products of one association, kept for reporting"""
    belief_pk: BeliefMatrix
    belief_kp: BeliefMatrix
    decisions: DecisionPair
    combined: CombinedBeliefMatrix
    padding: Padding
    solver_pairs: Optional[Tuple[Pair, ...]] = None


# ────────────────────────────────────────────────────────────────────────────
# Tracks
# ────────────────────────────────────────────────────────────────────────────

TrackStatus = Literal["tentative", "confirmed", "coasting"]


class TrackerConfig(_Frozen):
    """Lifecycle thresholds; defaults come from utils.config"""
    inflation: float = Field(ge=1.0)
    decay: float = Field(gt=0.0, le=1.0)
    delete_height: float = Field(ge=0.0, le=1.0)
    max_misses: int = Field(ge=0)
    confirm_hits: int = Field(ge=1)
    dt: float = Field(gt=0.0)
    alpha0: float = Field(ge=0.0, le=1.0)


class Track(_Frozen):
    """A known object: its current prediction window and lifecycle counters"""
    id: int = Field(ge=1)
    label: str
    state: FuzzyQuantity
    anchor: FuzzyQuantity
    status: TrackStatus
    hits: int = Field(default=0, ge=0)
    misses: int = Field(default=0, ge=0)
    last_confidence: float = 0.0

    def to_report(self) -> Dict:
        return {
            "id": self.id,
            "label": self.label,
            "status": self.status,
            "hits": self.hits,
            "misses": self.misses,
            "last_confidence": self.last_confidence,
            "state": self.state.to_spec(),
        }
