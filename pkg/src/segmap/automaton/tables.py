"""Incrementally maintained area/boundary bookkeeping for the automaton.

Targets come from the n-D statistics; actuals are maintained as dense
arrays indexed by segment id, with the domain border mapped to the extra
index ``S`` (number of segments).  All deviations are signed fractions:
target relative share minus realized relative share, so positive means
"too small in 2D".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..labels import BACKGROUND, BORDER
from ..ndgrid import SegmentStats
from ..state import CellState


def _pair_index(label: int, num_segments: int) -> int:
    return num_segments if label == BORDER else label


@dataclass
class DeviationTables:
    """Dense mirrors of the state's areas and pairwise contact lengths."""

    num_segments: int
    target_area: np.ndarray        # (S,) n-D relative sizes
    target_len: np.ndarray         # (S+1, S+1) n-D relative contact lengths
    adjacency: np.ndarray          # (S+1, S+1) bool, includes border row/col
    area_2d: np.ndarray            # (S,) int64 cell counts
    pair_2d: np.ndarray            # (S+1, S+1) int64 symmetric face counts
    total_2d: int                  # full grid cell count (fixed)
    total_boundary_2d: int         # sum of all realized contact lengths
    sum_x: np.ndarray              # (S,) int64 coordinate sums
    sum_y: np.ndarray              # (S,) int64

    # -- construction ---------------------------------------------------

    @classmethod
    def from_state(cls, state: CellState, stats: SegmentStats) -> "DeviationTables":
        ids = sorted(stats.sizes)
        num = len(ids)
        if ids != list(range(num)):
            raise ValueError("segment ids must be contiguous from 0; "
                             "relabel the input first")
        target_area = np.array(
            [stats.sizes[s] / stats.total_size for s in ids], dtype=np.float64)
        target_len = np.zeros((num + 1, num + 1), dtype=np.float64)
        adjacency = np.zeros((num + 1, num + 1), dtype=bool)
        for (a, b), faces in stats.boundaries.items():
            i, j = _pair_index(a, num), _pair_index(b, num)
            target_len[i, j] = target_len[j, i] = faces / stats.total_boundary
            adjacency[i, j] = adjacency[j, i] = True

        cells = state.cells
        height, width = cells.shape
        flat = cells.reshape(-1)
        seg = flat[flat >= 0]
        if seg.size and int(seg.max()) >= num:
            raise ValueError("state contains segment ids unknown to the stats")
        area_2d = np.bincount(seg, minlength=num).astype(np.int64)
        ys, xs = np.nonzero(cells >= 0)
        labels = cells[ys, xs]
        sum_x = np.bincount(labels, weights=xs, minlength=num).astype(np.int64)
        sum_y = np.bincount(labels, weights=ys, minlength=num).astype(np.int64)

        pair_2d = np.zeros((num + 1, num + 1), dtype=np.int64)

        def _acc(a: np.ndarray, b: np.ndarray) -> None:
            mask = (a != b) & (a >= 0) & (b >= 0)
            if not mask.any():
                return
            np.add.at(pair_2d, (a[mask], b[mask]), 1)

        _acc(cells[:, :-1], cells[:, 1:])
        _acc(cells[:, 1:], cells[:, :-1])
        _acc(cells[:-1, :], cells[1:, :])
        _acc(cells[1:, :], cells[:-1, :])
        for edge in (cells[0, :], cells[-1, :], cells[:, 0], cells[:, -1]):
            lab = edge[edge >= 0]
            np.add.at(pair_2d, (lab, np.full(lab.shape, num)), 1)
            np.add.at(pair_2d, (np.full(lab.shape, num), lab), 1)
        total_boundary = int(pair_2d.sum()) // 2

        return cls(num_segments=num, target_area=target_area,
                   target_len=target_len, adjacency=adjacency,
                   area_2d=area_2d, pair_2d=pair_2d,
                   total_2d=width * height, total_boundary_2d=total_boundary,
                   sum_x=sum_x, sum_y=sum_y)

    # -- derived views ---------------------------------------------------

    def area_dev(self) -> np.ndarray:
        """Signed per-segment area deviations, index = segment id."""
        return self.target_area - self.area_2d / self.total_2d

    def area_dev_lookup(self) -> np.ndarray:
        """Deviation lookup indexed by ``label + 2``.

        Index 0 covers crossing cells (never consulted), index 1 is the
        background's fixed deviation of -1, the rest are segments.
        """
        out = np.empty(self.num_segments + 2, dtype=np.float64)
        out[0] = 0.0
        out[1] = -1.0
        out[2:] = self.area_dev()
        return out

    def boundary_dev(self) -> np.ndarray:
        """Signed pairwise contact-length deviations (zero off-graph)."""
        realized = self.pair_2d / max(self.total_boundary_2d, 1)
        dev = self.target_len - realized
        dev[~self.adjacency] = 0.0
        return dev

    def last_cell_lookup(self) -> np.ndarray:
        """uint8 lookup by ``label + 2``: 1 if the segment has one cell."""
        out = np.zeros(self.num_segments + 2, dtype=np.uint8)
        out[2:] = self.area_2d == 1
        return out

    # -- incremental maintenance ------------------------------------------

    def apply_change(self, x: int, y: int, old: int, new: int,
                     pair_deltas: dict[tuple[int, int], int]) -> None:
        """Account for one cell's relabeling.

        ``pair_deltas`` maps sorted label pairs (segments or BORDER) to the
        net change of their shared-face counts, as computed from the cell's
        von Neumann neighborhood.
        """
        if old >= 0:
            self.area_2d[old] -= 1
            self.sum_x[old] -= x
            self.sum_y[old] -= y
        if new >= 0:
            self.area_2d[new] += 1
            self.sum_x[new] += x
            self.sum_y[new] += y
        for (a, b), delta in pair_deltas.items():
            i, j = _pair_index(a, self.num_segments), _pair_index(b, self.num_segments)
            self.pair_2d[i, j] += delta
            self.pair_2d[j, i] += delta
            self.total_boundary_2d += delta

    def audit(self, state: CellState, stats: SegmentStats) -> None:
        """Assert the incremental tables equal a fresh rebuild."""
        fresh = DeviationTables.from_state(state, stats)
        if (not np.array_equal(fresh.area_2d, self.area_2d)
                or not np.array_equal(fresh.pair_2d, self.pair_2d)
                or fresh.total_boundary_2d != self.total_boundary_2d
                or not np.array_equal(fresh.sum_x, self.sum_x)
                or not np.array_equal(fresh.sum_y, self.sum_y)):
            raise AssertionError("incremental tables drifted from the state")
