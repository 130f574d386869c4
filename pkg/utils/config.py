"""
Configuration module for evidassoc
Handles environment settings, logging setup, numeric tolerances and defaults
"""

import json
import os
from pathlib import Path
from typing import Optional, Dict

from dotenv import load_dotenv
import logging

# Load environment variables
load_dotenv()

# Logging configuration
LOG_LEVEL = os.getenv("EVIDASSOC_LOG_LEVEL", "INFO").upper()
LOG_FILE = os.getenv("EVIDASSOC_LOG_FILE", None)


def configure_logging(level: Optional[str] = None):
    handlers = [logging.StreamHandler()]
    if LOG_FILE:
        handlers.append(logging.FileHandler(LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=handlers,
        force=True,
    )


# Constants
APP_NAME = "evidassoc"
REPORT_VERSION = 1
SCENARIO_VERSION = 1
BUNDLED_SCENARIOS_DIR = Path(__file__).resolve().parent.parent / "scenarios"

# Optional JSON file with overrides, e.g. {"tracker": {"max_misses": 8}}
CONFIG_FILE = os.getenv("EVIDASSOC_CONFIG_FILE", None)

# Mass generation
DEFAULT_ALPHA0 = float(os.getenv("EVIDASSOC_ALPHA0", "0.9"))

# 2D similarity integration (cells per axis)
SIMILARITY_GRID_CELLS = int(os.getenv("EVIDASSOC_GRID_CELLS", "256"))

# Track lifecycle defaults (none of these come from the association model itself)
DEFAULT_INFLATION = float(os.getenv("EVIDASSOC_INFLATION", "1.2"))
DEFAULT_DECAY = float(os.getenv("EVIDASSOC_DECAY", "0.9"))
DEFAULT_DELETE_HEIGHT = float(os.getenv("EVIDASSOC_DELETE_HEIGHT", "0.3"))
DEFAULT_MAX_MISSES = int(os.getenv("EVIDASSOC_MAX_MISSES", "5"))
DEFAULT_CONFIRM_HITS = int(os.getenv("EVIDASSOC_CONFIRM_HITS", "2"))
DEFAULT_FRAME_DT = 1.0  # seconds

# Numeric tolerances
MASS_SUM_TOLERANCE = 1e-12
COLUMN_SUM_TOLERANCE = 1e-9
TOTAL_CONFLICT_TOLERANCE = 1e-12
SIMILARITY_CLAMP_SLACK = 1e-9
TIE_TOLERANCE = 1e-12

# Human-readable report formatting, same precision as the published tables
TEXT_DECIMALS = 4


def load_config() -> Dict:
    """Load configuration overrides from the JSON file named by EVIDASSOC_CONFIG_FILE"""
    if CONFIG_FILE and Path(CONFIG_FILE).exists():
        try:
            with open(CONFIG_FILE, 'r', encoding='utf-8') as f:
                return json.load(f)
        except (json.JSONDecodeError, IOError):
            logging.getLogger(__name__).warning(f"Ignoring unreadable config file {CONFIG_FILE}")

    return {}


def get_tracker_defaults() -> Dict:
    """Get the track lifecycle defaults, with any overrides from the config file applied"""
    defaults = {
        "inflation": DEFAULT_INFLATION,
        "decay": DEFAULT_DECAY,
        "delete_height": DEFAULT_DELETE_HEIGHT,
        "max_misses": DEFAULT_MAX_MISSES,
        "confirm_hits": DEFAULT_CONFIRM_HITS,
        "dt": DEFAULT_FRAME_DT,
    }
    overrides = load_config().get("tracker", {})
    defaults.update({k: v for k, v in overrides.items() if k in defaults})
    return defaults


def get_default_alpha0() -> float:
    """Get the default source reliability, honouring the config file"""
    return float(load_config().get("alpha0", DEFAULT_ALPHA0))


def get_bundled_scenario_path(name: str) -> Path:
    """Get the path of a scenario file shipped with the repository"""
    return BUNDLED_SCENARIOS_DIR / name
