"""2D cell state: the embedding itself, plus its dump format.

Cells hold a segment id (>= 0), BACKGROUND (-1) for separator space, or
CROSSING (-2) where two segment strands cross.  The dump format is a
plain text container (``CASTATE width height`` header, then ``height``
rows of ``width`` whitespace-separated labels) used for frames and for
resuming optimization runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .labels import CROSSING


class StateFormatError(ValueError):
    """Raised when a CASTATE file is malformed."""


@dataclass
class CellState:
    """2D label grid with crossing bookkeeping and the origin topology.

    ``cells[y, x]`` is the label at column x, row y.  ``crossing_registry``
    maps each CROSSING cell position ``(x, y)`` to the two segment pairs it
    separates (the crossing edges of the origin graph).  ``origin_graph``
    is kept for topology checks; it may be None for bare states loaded
    from dumps.
    """

    cells: np.ndarray
    crossing_registry: dict[tuple[int, int], tuple[tuple[int, int], tuple[int, int]]] = field(
        default_factory=dict)
    origin_graph: nx.Graph | None = None

    def __post_init__(self) -> None:
        self.cells = np.ascontiguousarray(self.cells, dtype=np.int32)
        if self.cells.ndim != 2:
            raise ValueError("cell state must be 2-dimensional")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.width, self.height)

    def num_crossings(self) -> int:
        return int(np.count_nonzero(self.cells == CROSSING))

    def copy(self) -> "CellState":
        return CellState(self.cells.copy(), dict(self.crossing_registry),
                         self.origin_graph)

    def crossing_strands(self, x: int, y: int) -> tuple[int, int] | None:
        """The (vertical, horizontal) segment ids around a crossing cell.

        Returns None if the cell is not a valid crossing (wrong label or
        the opposite-side invariant does not hold).
        """
        if self.cells[y, x] != CROSSING:
            return None
        if not (0 < x < self.width - 1 and 0 < y < self.height - 1):
            return None
        north = int(self.cells[y - 1, x])
        south = int(self.cells[y + 1, x])
        west = int(self.cells[y, x - 1])
        east = int(self.cells[y, x + 1])
        if north != south or west != east or north == west:
            return None
        if north < 0 or west < 0:
            return None
        return (north, west)


def save_castate(state: CellState, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"CASTATE {state.width} {state.height}\n")
        for row in state.cells:
            fh.write(" ".join(str(int(v)) for v in row))
            fh.write("\n")


def load_castate(path) -> CellState:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "CASTATE":
            raise StateFormatError("first line must be 'CASTATE width height'")
        try:
            width, height = int(header[1]), int(header[2])
        except ValueError as exc:
            raise StateFormatError(f"non-integer dimensions {header[1:]}") from exc
        if width <= 0 or height <= 0:
            raise StateFormatError(f"dimensions must be positive, got {width}x{height}")
        tokens = fh.read().split()
    if len(tokens) != width * height:
        raise StateFormatError(
            f"expected {width * height} labels, found {len(tokens)}")
    try:
        flat = np.array([int(t) for t in tokens], dtype=np.int32)
    except ValueError as exc:
        raise StateFormatError(f"non-integer label: {exc}") from exc
    if flat.min(initial=0) < CROSSING:
        bad = int(np.flatnonzero(flat < CROSSING)[0])
        raise StateFormatError(
            f"label {int(flat[bad])} at offset {bad} below CROSSING")
    state = CellState(flat.reshape(height, width))
    state.crossing_registry = derive_crossing_registry(state)
    return state


def derive_crossing_registry(state: CellState) -> dict:
    """Rebuild the crossing registry from cell labels alone.

    Each crossing separates the (vertical-strand, horizontal-strand) pair;
    without the drawing we cannot recover the original graph edges, so the
    registry stores the two strand labels paired with themselves' contact:
    ((v, h), (v, h)).  Sufficient for invariant checking and rendering.
    """
    registry = {}
    ys, xs = np.nonzero(state.cells == CROSSING)
    for y, x in zip(ys.tolist(), xs.tolist()):
        strands = state.crossing_strands(x, y)
        if strands is not None:
            v, h = strands
            registry[(x, y)] = ((v, h), (v, h))
    return registry
