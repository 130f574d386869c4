"""
Scenario files for evidassoc
JSON schema, loading with located errors, and seeded random-walk generation
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import jsonschema
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from backend.errors import ScenarioError
from backend.models import (
    FuzzyQuantity, FuzzyQuantity1D, FuzzyQuantity2D, MassTriple, TrackerConfig, quantity_from_spec,
)
from utils.config import SCENARIO_VERSION, get_default_alpha0, get_tracker_defaults

logger = logging.getLogger(__name__)


_INTERVAL = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_HEIGHT = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}

SCHEMA = {
  "type": "object",
  "$defs": {
    "quantity1d": {
      "type": "object",
      "required": ["support", "core"],
      "properties": {"support": _INTERVAL, "core": _INTERVAL, "height": _HEIGHT},
      "additionalProperties": False,
    },
    "quantity2d": {
      "type": "object",
      "required": ["x", "y"],
      "properties": {
        "x": {"$ref": "#/$defs/quantity1d"},
        "y": {"$ref": "#/$defs/quantity1d"},
        "height": _HEIGHT,
      },
      "additionalProperties": False,
    },
    "object": {
      "type": "object",
      "required": ["quantity"],
      "properties": {
        "label": {"type": "string"},
        "quantity": {"oneOf": [{"$ref": "#/$defs/quantity1d"}, {"$ref": "#/$defs/quantity2d"}]},
      },
    },
  },
  "properties": {
    "version": {"const": SCENARIO_VERSION},
    "name": {"type": "string"},
    "dimensionality": {"enum": [1, 2]},
    "alpha0": {"type": "number", "minimum": 0, "maximum": 1},
    "tracker": {
      "type": "object",
      "properties": {
        "inflation": {"type": "number", "minimum": 1},
        "decay": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "delete_height": {"type": "number", "minimum": 0, "maximum": 1},
        "max_misses": {"type": "integer", "minimum": 0},
        "confirm_hits": {"type": "integer", "minimum": 1},
        "dt": {"type": "number", "exclusiveMinimum": 0},
      },
      "additionalProperties": False,
    },
    "known": {"type": "array", "items": {"$ref": "#/$defs/object"}},
    "frames": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["perceived"],
        "properties": {
          "perceived": {"type": "array", "items": {"$ref": "#/$defs/object"}},
          "mass_grid": {
            "type": "array",
            "items": {
              "type": "array",
              "items": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1},
                        "minItems": 3, "maxItems": 3},
            },
          },
          "dt": {"type": "number", "exclusiveMinimum": 0},
        },
      },
    },
  },
  "required": ["version", "dimensionality", "frames"],
}


class ScenarioObject(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: Optional[str] = None
    quantity: Union[FuzzyQuantity1D, FuzzyQuantity2D]

    def to_dict(self) -> Dict:
        data = {"quantity": self.quantity.to_spec()}
        if self.label is not None:
            data = {"label": self.label, **data}
        return data


class ScenarioFrame(BaseModel):
    model_config = ConfigDict(frozen=True)

    perceived: Tuple[ScenarioObject, ...] = ()
    mass_grid: Optional[Tuple[Tuple[MassTriple, ...], ...]] = None
    dt: Optional[float] = Field(default=None, gt=0.0)

    def to_dict(self) -> Dict:
        data: Dict = {"perceived": [p.to_dict() for p in self.perceived]}
        if self.mass_grid is not None:
            data["mass_grid"] = [[t.as_list() for t in row] for row in self.mass_grid]
        if self.dt is not None:
            data["dt"] = self.dt
        return data


class Scenario(BaseModel):
    """A validated scenario: initial known objects and the frames to associate"""
    model_config = ConfigDict(frozen=True)

    version: int = SCENARIO_VERSION
    name: str = "unnamed"
    dimensionality: Literal[1, 2]
    alpha0: float = Field(ge=0.0, le=1.0)
    tracker: Dict[str, Union[int, float]] = Field(default_factory=dict)
    known: Tuple[ScenarioObject, ...] = ()
    frames: Tuple[ScenarioFrame, ...] = ()

    def tracker_config(self, alpha0: Optional[float] = None) -> TrackerConfig:
        """Config-file defaults, then the scenario's tracker block, then the override"""
        values = get_tracker_defaults()
        values.update(self.tracker)
        values["alpha0"] = self.alpha0 if alpha0 is None else alpha0
        return TrackerConfig(**values)

    def truncated(self, n_frames: Optional[int]) -> "Scenario":
        if n_frames is None:
            return self
        return self.model_copy(update={"frames": self.frames[:max(0, n_frames)]})

    def to_dict(self) -> Dict:
        return {
            "version": self.version,
            "name": self.name,
            "dimensionality": self.dimensionality,
            "alpha0": self.alpha0,
            "tracker": dict(self.tracker),
            "known": [k.to_dict() for k in self.known],
            "frames": [f.to_dict() for f in self.frames],
        }


def lint(data) -> List[str]:
    """Return list of error strings (with their field path) or [] if valid."""
    errors = []
    validator = jsonschema.Draft202012Validator(SCHEMA)
    for error in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path))):
        errors.append(f"{_path(error.absolute_path)}: {error.message}")
    if errors:
        return errors

    dim = data["dimensionality"]
    objects = [(f"known[{k}]", obj) for k, obj in enumerate(data.get("known", []))]
    for f, frame in enumerate(data["frames"]):
        objects += [(f"frames[{f}].perceived[{p}]", obj) for p, obj in enumerate(frame["perceived"])]
    for where, obj in objects:
        found = 2 if "x" in obj["quantity"] else 1
        if found != dim:
            errors.append(f"{where}.quantity: {found}D quantity in a {dim}D scenario")

    for f, frame in enumerate(data["frames"]):
        grid = frame.get("mass_grid")
        if grid is None:
            continue
        if len(grid) != len(frame["perceived"]):
            errors.append(
                f"frames[{f}].mass_grid: {len(grid)} rows for {len(frame['perceived'])} perceived objects"
            )
        if len({len(row) for row in grid}) > 1:
            errors.append(f"frames[{f}].mass_grid: rows have different lengths")
        elif f == 0 and grid and len(grid[0]) != len(data.get("known", [])):
            errors.append(
                f"frames[0].mass_grid: {len(grid[0])} columns for {len(data.get('known', []))} known objects"
            )
    return errors


def _path(parts) -> str:
    out = ""
    for part in parts:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def _build_object(where: str, data: Dict) -> ScenarioObject:
    try:
        return ScenarioObject(label=data.get("label"), quantity=quantity_from_spec(data["quantity"]))
    except ValidationError as e:
        first = e.errors()[0]
        raise ScenarioError(f"{where}.quantity: {first['msg']}") from e


def scenario_from_dict(data: Dict) -> Scenario:
    """Validate a decoded scenario document and build the Scenario"""
    errors = lint(data)
    if errors:
        raise ScenarioError("invalid scenario: " + "; ".join(errors))

    known = tuple(_build_object(f"known[{k}]", obj) for k, obj in enumerate(data.get("known", [])))
    frames = []
    for f, frame in enumerate(data["frames"]):
        perceived = tuple(
            _build_object(f"frames[{f}].perceived[{p}]", obj) for p, obj in enumerate(frame["perceived"])
        )
        grid = None
        if "mass_grid" in frame:
            rows = []
            for i, row in enumerate(frame["mass_grid"]):
                try:
                    rows.append(tuple(MassTriple.of(*cell) for cell in row))
                except ValidationError as e:
                    raise ScenarioError(f"frames[{f}].mass_grid[{i}]: {e.errors()[0]['msg']}") from e
            grid = tuple(rows)
        frames.append(ScenarioFrame(perceived=perceived, mass_grid=grid, dt=frame.get("dt")))

    try:
        return Scenario(
            version=data["version"],
            name=data.get("name", "unnamed"),
            dimensionality=data["dimensionality"],
            alpha0=data.get("alpha0", get_default_alpha0()),
            tracker=data.get("tracker", {}),
            known=known,
            frames=tuple(frames),
        )
    except ValidationError as e:
        first = e.errors()[0]
        raise ScenarioError(f"{_path(first['loc'])}: {first['msg']}") from e


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read and validate a scenario file; every failure is a ScenarioError"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e

    scenario = scenario_from_dict(data)
    logger.info(
        f"Loaded scenario '{scenario.name}' from {path}: {len(scenario.known)} known objects, "
        f"{len(scenario.frames)} frames, {scenario.dimensionality}D"
    )
    return scenario


def _window(center: float, half_support: float, half_core: float) -> FuzzyQuantity1D:
    return FuzzyQuantity1D.trapezoid(
        (center - half_support, center + half_support),
        (center - half_core, center + half_core),
    )


def _measurement(position: np.ndarray, dimensionality: int) -> FuzzyQuantity:
    if dimensionality == 1:
        return _window(float(position[0]), 2.0, 0.5)
    return FuzzyQuantity2D(x=_window(float(position[0]), 2.0, 0.5),
                           y=_window(float(position[1]), 2.0, 0.5))


def generate_scenario(seed: int, objects: int = 3, frames: int = 5,
                      dimensionality: int = 1) -> Scenario:
    """
    Seeded random walk: objects start spread along the axis, drift with a fixed
    velocity plus noise, and are reported in a shuffled order every frame.
    """
    if dimensionality not in (1, 2):
        raise ScenarioError(f"dimensionality must be 1 or 2, got {dimensionality}")
    if objects < 0 or frames < 0:
        raise ScenarioError("objects and frames must be non-negative")

    rng = np.random.default_rng(seed)
    positions = np.zeros((objects, dimensionality))
    positions[:, 0] = np.arange(objects) * 10.0
    if dimensionality == 2:
        positions[:, 1] = rng.uniform(-5.0, 5.0, size=objects)
    velocities = rng.uniform(-1.0, 1.0, size=(objects, dimensionality))

    known = tuple(
        ScenarioObject(label=f"O{k + 1}", quantity=_measurement(positions[k], dimensionality))
        for k in range(objects)
    )
    generated = []
    for _ in range(frames):
        positions = positions + velocities + rng.normal(0.0, 0.2, size=positions.shape)
        order = rng.permutation(objects)
        generated.append(ScenarioFrame(perceived=tuple(
            ScenarioObject(quantity=_measurement(positions[k], dimensionality)) for k in order
        )))

    logger.info(f"Generated scenario from seed {seed}: {objects} objects, {frames} frames, {dimensionality}D")
    return Scenario(
        name=f"random-walk-{seed}",
        dimensionality=dimensionality,
        alpha0=get_default_alpha0(),
        known=known,
        frames=tuple(generated),
    )
