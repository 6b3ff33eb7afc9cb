"""n-dimensional labeled grids: file format, generators, statistics.

A labeled grid assigns every cell of a dense n-D lattice a non-negative
segment id.  Grids are stored in a small text/binary container ("NDSEG1")
and summarised by per-segment sizes and shared-face counts, which later
drive the 2D embedding targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .labels import BORDER


class GridFormatError(ValueError):
    """Raised when an NDSEG file is malformed."""


@dataclass(frozen=True)
class LabeledGrid:
    """A dense n-D array of segment ids (non-negative int32)."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.labels, dtype=np.int32)
        if arr.ndim < 1:
            raise ValueError("grid must have at least one dimension")
        object.__setattr__(self, "labels", arr)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.labels.shape

    @property
    def num_cells(self) -> int:
        return int(self.labels.size)

    def segment_ids(self) -> np.ndarray:
        return np.unique(self.labels)


@dataclass
class SegmentStats:
    """Sizes and shared-face counts extracted from a labeled grid.

    ``boundaries`` maps unordered pairs ``(a, b)`` with ``a < b`` to the
    number of shared unit faces; pairs ``(BORDER, s)`` count the faces of
    segment ``s`` exposed on the grid surface.  ``total_boundary`` is the
    sum over all pairs (border faces included).
    """

    sizes: dict[int, int] = field(default_factory=dict)
    total_size: int = 0
    boundaries: dict[tuple[int, int], int] = field(default_factory=dict)
    total_boundary: int = 0

    def segment_ids(self) -> list[int]:
        return sorted(self.sizes)


def _pair_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


# ---------------------------------------------------------------------------
# NDSEG container
# ---------------------------------------------------------------------------

def _read_header_line(buf, what: str) -> str:
    raw = buf.readline()
    if not raw:
        raise GridFormatError(f"unexpected end of file while reading {what}")
    return raw.decode("ascii", errors="replace").strip()


def load_grid(path) -> LabeledGrid:
    """Load a grid from an NDSEG1 file (ascii or binary payload).

    Labels are returned exactly as stored; callers wanting one id per
    connected region should pass the result through
    :func:`relabel_connected_components`.
    """
    with open(path, "rb") as fh:
        magic = _read_header_line(fh, "magic line")
        if magic != "NDSEG1":
            raise GridFormatError(f"bad magic line {magic!r}, expected 'NDSEG1'")
        dims_line = _read_header_line(fh, "dims line").split()
        if not dims_line or dims_line[0] != "dims" or len(dims_line) < 2:
            raise GridFormatError("second line must be 'dims d0 d1 ...'")
        try:
            dims = tuple(int(tok) for tok in dims_line[1:])
        except ValueError as exc:
            raise GridFormatError(f"non-integer dimension in {dims_line[1:]}") from exc
        if any(d <= 0 for d in dims):
            raise GridFormatError(f"dimensions must be positive, got {dims}")
        enc_line = _read_header_line(fh, "encoding line").split()
        if len(enc_line) != 2 or enc_line[0] != "encoding":
            raise GridFormatError("third line must be 'encoding ascii|binary'")
        encoding = enc_line[1]
        count = int(np.prod(dims))
        if encoding == "ascii":
            tokens = fh.read().split()
            if len(tokens) != count:
                raise GridFormatError(
                    f"expected {count} labels, found {len(tokens)}")
            try:
                flat = np.array([int(t) for t in tokens], dtype=np.int64)
            except ValueError as exc:
                raise GridFormatError(f"non-integer label token: {exc}") from exc
        elif encoding == "binary":
            payload = fh.read()
            if len(payload) != 4 * count:
                raise GridFormatError(
                    f"expected {4 * count} payload bytes, found {len(payload)}")
            flat = np.frombuffer(payload, dtype="<i4").astype(np.int64)
        else:
            raise GridFormatError(f"unknown encoding {encoding!r}")
    neg = np.flatnonzero(flat < 0)
    if neg.size:
        raise GridFormatError(
            f"negative label {int(flat[neg[0]])} at flat offset {int(neg[0])}")
    return LabeledGrid(flat.reshape(dims).astype(np.int32))


def save_grid(grid: LabeledGrid, path, encoding: str = "ascii") -> None:
    """Write a grid as NDSEG1 with the chosen payload encoding."""
    if encoding not in ("ascii", "binary"):
        raise ValueError(f"unknown encoding {encoding!r}")
    header = (
        "NDSEG1\n"
        f"dims {' '.join(str(d) for d in grid.dims)}\n"
        f"encoding {encoding}\n"
    ).encode("ascii")
    flat = grid.labels.reshape(-1)
    with open(path, "wb") as fh:
        fh.write(header)
        if encoding == "ascii":
            fh.write(" ".join(str(int(v)) for v in flat).encode("ascii"))
            fh.write(b"\n")
        else:
            fh.write(np.ascontiguousarray(flat, dtype="<i4").tobytes())


# ---------------------------------------------------------------------------
# Relabeling
# ---------------------------------------------------------------------------

def relabel_connected_components(grid: LabeledGrid) -> LabeledGrid:
    """Split every stored label into its face-connected components.

    New ids are assigned 0..K-1, ordered by (original label, array scan
    order of the component's first cell).  A grid whose labels are already
    connected and numbered 0..S-1 maps to itself.
    """
    labels = grid.labels
    structure = ndimage.generate_binary_structure(labels.ndim, 1)
    out = np.empty_like(labels)
    next_id = 0
    for orig in np.unique(labels):
        mask = labels == orig
        comps, ncomp = ndimage.label(mask, structure=structure)
        # scipy numbers components by scan order of their first cell,
        # which matches the ordering contract directly.
        for c in range(1, ncomp + 1):
            out[comps == c] = next_id
            next_id += 1
    return LabeledGrid(out)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

def compute_stats(grid: LabeledGrid) -> SegmentStats:
    """Count per-segment cells and shared faces (grid surface included)."""
    labels = grid.labels.astype(np.int64)
    stats = SegmentStats()
    counts = np.bincount(labels.reshape(-1))
    for sid in np.flatnonzero(counts):
        stats.sizes[int(sid)] = int(counts[sid])
    if counts.size and counts[0]:
        stats.sizes[0] = int(counts[0])
    stats.sizes = dict(sorted(stats.sizes.items()))
    stats.total_size = int(labels.size)

    pair_counts: dict[tuple[int, int], int] = {}

    def _accumulate(a: np.ndarray, b: np.ndarray) -> None:
        mask = a != b
        if not mask.any():
            return
        lo = np.minimum(a[mask], b[mask])
        hi = np.maximum(a[mask], b[mask])
        key = lo * (labels.max() + 2) + hi
        uniq, cnt = np.unique(key, return_counts=True)
        base = labels.max() + 2
        for k, c in zip(uniq.tolist(), cnt.tolist()):
            pair = (int(k // base), int(k % base))
            pair_counts[pair] = pair_counts.get(pair, 0) + int(c)

    for axis in range(labels.ndim):
        lo_sl = [slice(None)] * labels.ndim
        hi_sl = [slice(None)] * labels.ndim
        lo_sl[axis] = slice(None, -1)
        hi_sl[axis] = slice(1, None)
        _accumulate(labels[tuple(lo_sl)], labels[tuple(hi_sl)])
        # surface faces on both ends of this axis
        for end in (0, -1):
            face = [slice(None)] * labels.ndim
            face[axis] = end
            vals, cnts = np.unique(labels[tuple(face)], return_counts=True)
            for v, c in zip(vals.tolist(), cnts.tolist()):
                pair = _pair_key(BORDER, int(v))
                pair_counts[pair] = pair_counts.get(pair, 0) + int(c)

    stats.boundaries = dict(sorted(pair_counts.items()))
    stats.total_boundary = int(sum(pair_counts.values()))
    return stats


# ---------------------------------------------------------------------------
# Dataset generators
# ---------------------------------------------------------------------------

def generate_d1(dims: tuple[int, ...], num_segments: int, seed: int) -> LabeledGrid:
    """Grow ``num_segments`` regions from random seed cells.

    Each segment gets a growth rate drawn uniformly from (0, 1].  Growth
    proceeds in rounds; in each round every segment, in id order, offers
    each unassigned face-neighbor of its frontier a claim that succeeds
    with probability equal to its rate.  Cells left unreachable when all
    frontiers die out are attached to the nearest assigned neighbor by a
    breadth-first sweep.  Deterministic for a fixed seed.
    """
    dims = tuple(int(d) for d in dims)
    n_cells = int(np.prod(dims))
    if num_segments < 1 or num_segments > n_cells:
        raise ValueError(
            f"num_segments must be in [1, {n_cells}], got {num_segments}")
    rng = np.random.Generator(np.random.PCG64(seed))

    labels = np.full(n_cells, -1, dtype=np.int32)
    seeds = rng.choice(n_cells, size=num_segments, replace=False)
    rates = 1.0 - rng.random(num_segments)  # uniform on (0, 1]

    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides.reverse()

    def neighbors(flat: int):
        rem = flat
        coords = []
        for st in strides:
            coords.append(rem // st)
            rem %= st
        for axis, st in enumerate(strides):
            if coords[axis] > 0:
                yield flat - st
            if coords[axis] + 1 < dims[axis]:
                yield flat + st

    frontiers: list[list[int]] = []
    for sid, cell in enumerate(seeds.tolist()):
        labels[cell] = sid
        frontiers.append([cell])

    unassigned = n_cells - num_segments
    while unassigned > 0 and any(frontiers):
        for sid in range(num_segments):
            new_frontier = []
            for cell in frontiers[sid]:
                keep = False
                for nb in neighbors(cell):
                    if labels[nb] < 0:
                        if rng.random() < rates[sid]:
                            labels[nb] = sid
                            unassigned -= 1
                            new_frontier.append(nb)
                        else:
                            keep = True
                if keep:
                    new_frontier.append(cell)
            frontiers[sid] = new_frontier

    if unassigned > 0:
        # Safety net: attach stranded cells outward from the assigned mass.
        from collections import deque

        queue = deque(np.flatnonzero(labels >= 0).tolist())
        while queue:
            cell = queue.popleft()
            for nb in neighbors(cell):
                if labels[nb] < 0:
                    labels[nb] = labels[cell]
                    queue.append(nb)

    return LabeledGrid(labels.reshape(dims))


def generate_d2() -> LabeledGrid:
    """The fixed 20x20x20 octant grid: eight 10x10x10 cubic segments."""
    idx = np.indices((20, 20, 20))
    octant = ((idx[0] >= 10).astype(np.int32) << 2) \
        | ((idx[1] >= 10).astype(np.int32) << 1) \
        | (idx[2] >= 10).astype(np.int32)
    return LabeledGrid(octant)
