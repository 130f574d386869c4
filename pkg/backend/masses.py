"""
Mass generation for evidassoc
Turns a similarity index and a source reliability into a basic belief assignment
"""

import logging
import math
from typing import List, Sequence, Union

from backend.models import MassTriple, Reliability, SimilarityIndex

logger = logging.getLogger(__name__)


def generate_mass_triple(s: Union[SimilarityIndex, float], r: Union[Reliability, float]) -> MassTriple:
    """
    Sine operator: total discordance gives m_yes = 0, total agreement m_no = 0,
    and 1 - alpha0 always goes to ignorance.
    """
    s = float(s.value if isinstance(s, SimilarityIndex) else s)
    alpha0 = r.alpha0 if isinstance(r, Reliability) else Reliability(alpha0=r).alpha0
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"similarity must lie in [0, 1], got {s}")

    d = math.pi * (2.0 * (1.0 - s) - 1.0)
    against = (math.sin(d / 2.0) + 1.0) / 2.0
    return MassTriple(
        m_yes=alpha0 * (1.0 - against),
        m_no=alpha0 * against,
        m_theta=1.0 - alpha0,
    )


def generate_mass_grid(similarities: Sequence[Sequence[Union[SimilarityIndex, float]]],
                       r: Union[Reliability, float]) -> List[List[MassTriple]]:
    """Mass triples for an n × m similarity grid"""
    grid = [[generate_mass_triple(s, r) for s in row] for row in similarities]
    logger.debug(f"Generated {len(grid)}x{len(grid[0]) if grid else 0} mass grid")
    return grid
