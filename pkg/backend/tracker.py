"""
Track lifecycle for evidassoc
Keeps the known objects across frames: spawns tracks for appeared objects,
coasts unmatched tracks with growing uncertainty and deletes lost ones
"""

import logging
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from backend.assignment import associate_with_trace
from backend.errors import DimensionMismatchError
from backend.fuzzy import similarity_grid
from backend.masses import generate_mass_grid
from backend.models import (
    AssociationResult, AssociationTrace, FuzzyQuantity, MassTriple, Track, TrackerConfig,
)
from utils.config import get_default_alpha0, get_tracker_defaults

logger = logging.getLogger(__name__)


class FrameOutcome(BaseModel):
    """Everything one tracking step produced"""
    model_config = ConfigDict(frozen=True)

    tracks: Tuple[Track, ...]
    result: AssociationResult
    trace: AssociationTrace
    known_ids: Tuple[int, ...]
    known_labels: Tuple[str, ...]
    spawned: Tuple[int, ...] = ()
    deleted: Tuple[int, ...] = ()


def default_tracker_config(**overrides) -> TrackerConfig:
    """TrackerConfig from the environment/config-file defaults"""
    values = get_tracker_defaults()
    values["alpha0"] = get_default_alpha0()
    values.update({k: v for k, v in overrides.items() if v is not None})
    return TrackerConfig(**values)


def predict(track: Track, dt: float, inflation: float, decay: float) -> Track:
    """
    Coasting window for a track that has missed `track.misses` frames in a row.

    Support grows by inflation**misses about the core center and height shrinks
    by decay**misses, both applied to the last matched window.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if inflation < 1.0:
        raise ValueError(f"inflation must be >= 1, got {inflation}")

    anchor = track.anchor
    state = anchor.widened(inflation ** track.misses)
    state = state.with_height(anchor.height * decay ** track.misses)
    return track.model_copy(update={"state": state})


class Tracker:
    """
    Owns the track list and the id counter of one run.

    Column j of every association is the j-th live track, in id order.
    """

    def __init__(self, config: Optional[TrackerConfig] = None,
                 initial_known: Sequence[Tuple[Optional[str], FuzzyQuantity]] = ()):
        self.config = config or default_tracker_config()
        self._tracks: List[Track] = []
        self._next_id = 1
        self.frame_index = 0
        for label, state in initial_known:
            self._spawn(state, label, status="confirmed", hits=self.config.confirm_hits)

    @property
    def tracks(self) -> Tuple[Track, ...]:
        return tuple(self._tracks)

    def _spawn(self, state: FuzzyQuantity, label: Optional[str], status: str, hits: int) -> Track:
        track_id = self._next_id
        self._next_id += 1
        track = Track(
            id=track_id,
            label=label or f"T{track_id}",
            state=state,
            anchor=state,
            status=status,
            hits=hits,
        )
        self._tracks.append(track)
        return track

    def _check_inputs(self, perceived: Sequence[FuzzyQuantity],
                      mass_grid: Optional[Sequence[Sequence[MassTriple]]]):
        dims = {q.dimensionality for q in perceived} | {t.state.dimensionality for t in self._tracks}
        if len(dims) > 1:
            raise DimensionMismatchError(f"mixed dimensionality in frame {self.frame_index}: {sorted(dims)}")
        if mass_grid is None:
            return
        if len(mass_grid) != len(perceived):
            raise DimensionMismatchError(
                f"mass grid has {len(mass_grid)} rows for {len(perceived)} perceived objects"
            )
        for row in mass_grid:
            if len(row) != len(self._tracks):
                raise DimensionMismatchError(
                    f"mass grid row has {len(row)} entries for {len(self._tracks)} known objects"
                )

    def step(self, perceived: Sequence[FuzzyQuantity],
             mass_grid: Optional[Sequence[Sequence[MassTriple]]] = None,
             labels: Optional[Sequence[Optional[str]]] = None,
             force_hungarian: bool = False,
             dt: Optional[float] = None) -> FrameOutcome:
        """
        Associate one frame of perceived objects with the live tracks and
        update the lifecycle. A mass_grid bypasses similarity and mass generation.
        """
        cfg = self.config
        dt = cfg.dt if dt is None else dt
        labels = list(labels) if labels is not None else [None] * len(perceived)
        self._check_inputs(perceived, mass_grid)

        known = list(self._tracks)
        if mass_grid is None:
            similarities = similarity_grid(perceived, [t.state for t in known])
            mass_grid = generate_mass_grid(similarities, cfg.alpha0)

        result, trace = associate_with_trace(mass_grid, n_known=len(known),
                                             force_hungarian=force_hungarian)

        updated: List[Track] = []
        deleted: List[int] = []
        partner = {j: i for i, j in result.matched}
        for j, track in enumerate(known):
            if j in partner:
                updated.append(self._on_match(track, perceived[partner[j]], result.confidence))
                continue
            coasted = self._on_miss(track, dt)
            if coasted.state.height < cfg.delete_height or coasted.misses > cfg.max_misses:
                logger.info(
                    f"Deleting track {coasted.id} ({coasted.label}): misses={coasted.misses} "
                    f"height={coasted.state.height:.4f}"
                )
                deleted.append(coasted.id)
            else:
                updated.append(coasted)

        self._tracks = updated
        spawned = []
        for i in result.appeared:
            status = "confirmed" if cfg.confirm_hits <= 1 else "tentative"
            track = self._spawn(perceived[i], labels[i], status=status, hits=1)
            spawned.append(track.id)
            logger.info(f"Spawned {status} track {track.id} ({track.label}) from perceived object {i}")

        outcome = FrameOutcome(
            tracks=self.tracks,
            result=result,
            trace=trace,
            known_ids=tuple(t.id for t in known),
            known_labels=tuple(t.label for t in known),
            spawned=tuple(spawned),
            deleted=tuple(deleted),
        )
        logger.info(
            f"Frame {self.frame_index}: {len(result.matched)} matched, {len(spawned)} spawned, "
            f"{len(deleted)} deleted, {len(self._tracks)} alive"
        )
        self.frame_index += 1
        return outcome

    def _on_match(self, track: Track, measurement: FuzzyQuantity, psi: float) -> Track:
        hits = track.hits + 1
        status = track.status
        if status == "coasting" or (status == "tentative" and hits >= self.config.confirm_hits):
            status = "confirmed"
        if status != track.status:
            logger.info(f"Track {track.id} ({track.label}): {track.status} -> {status}")
        return track.model_copy(update={
            "state": measurement,
            "anchor": measurement,
            "status": status,
            "hits": hits,
            "misses": 0,
            "last_confidence": psi,
        })

    def _on_miss(self, track: Track, dt: float) -> Track:
        status = "coasting" if track.status == "confirmed" else track.status
        missed = track.model_copy(update={"misses": track.misses + 1, "status": status})
        return predict(missed, dt, self.config.inflation, self.config.decay)
