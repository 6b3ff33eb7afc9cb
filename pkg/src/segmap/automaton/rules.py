"""Scalar reference implementations of the automaton's local rules.

These are the readable, per-cell definitions; the kernels vectorize or
compile the same logic.  The test suite holds the kernels to these
functions bit for bit.
"""

from __future__ import annotations

import numpy as np

from ..labels import BACKGROUND, BORDER, CROSSING
from ..ndgrid import SegmentStats
from ..state import CellState
from .tables import DeviationTables, _pair_index

# Clockwise ring of the 8 Moore offsets, starting north; consecutive ring
# positions are always von Neumann neighbors of each other, which is what
# makes the transition count a valid local connectivity test.
MOORE_RING = ((0, -1), (1, -1), (1, 0), (1, 1),
              (0, 1), (-1, 1), (-1, 0), (-1, -1))
VON_NEUMANN = ((0, -1), (0, 1), (-1, 0), (1, 0))   # N, S, W, E

EXTERIOR = -99  # pseudo-label for off-grid positions in local rules


def _label_at(cells: np.ndarray, x: int, y: int) -> int:
    height, width = cells.shape
    if 0 <= x < width and 0 <= y < height:
        return int(cells[y, x])
    return EXTERIOR


def security_factor(cell: tuple[int, int], cs: CellState) -> int:
    """Neighborhood compactness: 3 per same-label face neighbor plus 1 per
    same-label diagonal neighbor, 0 (isolated) to 16 (uniform)."""
    x, y = cell
    own = int(cs.cells[y, x])
    face = sum(_label_at(cs.cells, x + dx, y + dy) == own
               for dx, dy in VON_NEUMANN)
    diag = sum(_label_at(cs.cells, x + dx, y + dy) == own
               for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1)))
    return 3 * face + diag


def moore_transitions(cell: tuple[int, int], cs: CellState) -> int:
    """Label changes along the clockwise Moore walk (exterior counts as a
    label of its own)."""
    x, y = cell
    ring = [_label_at(cs.cells, x + dx, y + dy) for dx, dy in MOORE_RING]
    return sum(ring[i] != ring[(i + 1) % 8] for i in range(8))


def is_topology_critical(cell: tuple[int, int], cs: CellState) -> bool:
    """True when relabeling the cell could change segment topology.

    Crossing cells are always critical; a segment's last cell is critical;
    otherwise a cell is critical iff its Moore walk shows more than three
    label changes (its label would not remain a single contiguous arc).
    """
    x, y = cell
    own = int(cs.cells[y, x])
    if own == CROSSING:
        return True
    if own >= 0 and int(np.count_nonzero(cs.cells == own)) == 1:
        return True
    return moore_transitions(cell, cs) > 3


def delta_boundary_length(cell: tuple[int, int], from_segment: int,
                          to_segment: int, cs: CellState) -> int:
    """Change of the pair's shared boundary length if the cell flips.

    Counts the cell's von Neumann neighbors in each segment; relabeling
    from s_i to s_j turns s_j-faces into s_i-faces, so the (s_i, s_j)
    contact changes by N_i - N_j.
    """
    x, y = cell
    n_from = sum(_label_at(cs.cells, x + dx, y + dy) == from_segment
                 for dx, dy in VON_NEUMANN)
    n_to = sum(_label_at(cs.cells, x + dx, y + dy) == to_segment
               for dx, dy in VON_NEUMANN)
    return n_from - n_to


def area_deviation(segment: int, stats: SegmentStats,
                   tables: DeviationTables) -> float:
    """Signed relative-size gap; BACKGROUND is fixed at -1 so that any
    under-target neighbor can claim background cells."""
    if segment == BACKGROUND:
        return -1.0
    if segment not in stats.sizes:
        raise KeyError(f"unknown segment id {segment}")
    return (stats.sizes[segment] / stats.total_size
            - int(tables.area_2d[segment]) / tables.total_2d)


def boundary_deviation(pair: tuple[int, int], stats: SegmentStats,
                       tables: DeviationTables) -> float:
    """Signed relative contact-length gap for a segment (or border) pair."""
    key = (min(pair), max(pair))
    if key not in stats.boundaries:
        raise KeyError(f"{pair} is not a contact of the input")
    i = _pair_index(pair[0], tables.num_segments)
    j = _pair_index(pair[1], tables.num_segments)
    return (stats.boundaries[key] / stats.total_boundary
            - int(tables.pair_2d[i, j]) / tables.total_boundary_2d)
