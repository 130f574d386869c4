# Pytest configuration file for the evidassoc test suite
# Puts the repository root on sys.path and provides the shared mass grids
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from backend.models import MassTriple  # noqa: E402

# Three perceived objects (rows) against four known objects (columns)
SECTION5_ROWS = [
    [(0.8, 0.1, 0.1), (0.5, 0.4, 0.1), (0.1, 0.8, 0.1), (0.0, 0.9, 0.1)],
    [(0.5, 0.1, 0.4), (0.5, 0.1, 0.4), (0.1, 0.7, 0.2), (0.0, 0.9, 0.1)],
    [(0.4, 0.1, 0.5), (0.8, 0.1, 0.1), (0.1, 0.6, 0.3), (0.0, 0.9, 0.1)],
]


def section5_grid():
    return [[MassTriple.of(*cell) for cell in row] for row in SECTION5_ROWS]


@pytest.fixture
def section5():
    return section5_grid()
