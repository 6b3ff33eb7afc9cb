"""Rasterize an orthogonal drawing into the automaton's initial state.

Vertex boxes are filled with their segment ids; every edge path is
painted 1 cell wide, first half with one endpoint's id and second half
with the other's.  Split positions are adjusted so no crossing cell ends
up between two different labels of the same strand and the two strands at
each crossing carry distinct labels.  Border edges are painted entirely
with their segment's id down to the bottom grid row.  Afterwards the grid
is compacted: any row or column identical to an adjacent one is removed
until a fixpoint, which provably preserves the extracted adjacency.
"""

from __future__ import annotations

import logging

import networkx as nx
import numpy as np

from .labels import BACKGROUND, BORDER, CROSSING
from .layout.ortho import OrthoDrawing, orthogonal_draw
from .layout.planarize import LayoutError, PlanarizedGraph
from .metrics import validate_topology
from .state import CellState

log = logging.getLogger("segmap")

MAX_CELLS = 4096 * 4096


def _choose_splits(drawing: OrthoDrawing) -> dict:
    """Half/half split index per edge, honoring crossing constraints.

    For edge (a, b) with a < b and path length n the default split puts
    cells [0, s) on a and [s, n) on b, with an odd path's center cell on
    the smaller id.  A crossing at path index p requires s not in
    {p, p+1} (both strand cells around a crossing keep one label) and a
    label different from the other strand's label there.
    """
    cross_at = {}   # orig edge -> list of (path index, crossing cell)
    for cell, origs in drawing.crossings.items():
        for orig in origs:
            path = drawing.edge_paths[orig]
            cross_at.setdefault(orig, []).append((path.index(cell), cell))

    labels_at = {}  # (crossing cell, orig edge) -> label
    splits = {}
    border_edges = sorted(e for e in drawing.edge_paths if e[0] == BORDER)
    inner_edges = sorted(e for e in drawing.edge_paths if e[0] != BORDER)
    for orig in border_edges:
        for _p, cell in cross_at.get(orig, []):
            labels_at[(cell, orig)] = orig[1]

    for orig in inner_edges:
        a, b = orig
        n = len(drawing.edge_paths[orig])
        default = n // 2 + 1 if n % 2 else n // 2
        chosen = None
        for delta in range(max(default, n - default) + 1):
            for s in (default - delta, default + delta):
                if not 1 <= s <= n - 1:
                    continue
                ok = True
                for p, cell in cross_at.get(orig, []):
                    if s in (p, p + 1):
                        ok = False
                        break
                    label = a if s >= p + 2 else b
                    other = next(o for o in drawing.crossings[cell] if o != orig)
                    fixed = labels_at.get((cell, other))
                    if fixed is not None and fixed == label:
                        ok = False
                        break
                if ok:
                    chosen = s
                    break
            if chosen is not None:
                break
        if chosen is None:
            raise LayoutError(f"no valid label split for edge {orig}")
        splits[orig] = chosen
        for p, cell in cross_at.get(orig, []):
            labels_at[(cell, orig)] = a if chosen >= p + 2 else b
    return splits


def _breakpoints(drawing: OrthoDrawing, splits: dict):
    """Rows/columns where the painted grid's content can change.

    Rows strictly between two breakpoints are identical to the breakpoint
    row above them (straight vertical runs and box interiors do not vary),
    so painting only breakpoint rows/columns and compacting afterwards
    gives the same result as painting the full grid — without allocating
    it.  Columns analogously.
    """
    rows, cols = set(), set()

    def mark(x, y):
        cols.update((x - 1, x, x + 1))
        rows.update((y - 1, y, y + 1))

    for v, (x0, y0, x1, y1) in drawing.vertex_boxes.items():
        cols.update((x0 - 1, x0, x1, x1 + 1))
        rows.update((y0 - 1, y0, y1, y1 + 1))
    for orig, path in drawing.edge_paths.items():
        mark(*path[0])
        mark(*path[-1])
        s = splits.get(orig)
        if s is not None:
            mark(*path[s - 1])
            mark(*path[s])
        for i in range(1, len(path) - 1):
            (ax, ay), (bx, by) = path[i - 1], path[i + 1]
            if ax != bx and ay != by:     # turn
                mark(*path[i])
    for cell in drawing.crossings:
        mark(*cell)
    rows.update((0, drawing.height - 1))
    cols.update((0, drawing.width - 1))
    keep_rows = sorted(r for r in rows if 0 <= r < drawing.height)
    keep_cols = sorted(c for c in cols if 0 <= c < drawing.width)
    return keep_rows, keep_cols


def build_initial_config(drawing: OrthoDrawing, graph: nx.Graph) -> CellState:
    """Paint the drawing into a label grid (coordinate-compressed)."""
    splits = _choose_splits(drawing)
    keep_rows, keep_cols = _breakpoints(drawing, splits)
    height, width = len(keep_rows), len(keep_cols)
    if width * height > MAX_CELLS:
        raise LayoutError(
            f"initial grid {width}x{height} exceeds the "
            f"{MAX_CELLS}-cell memory cap")
    row_of = {r: i for i, r in enumerate(keep_rows)}
    col_of = {c: i for i, c in enumerate(keep_cols)}
    row_arr = np.asarray(keep_rows)
    col_arr = np.asarray(keep_cols)
    cells = np.full((height, width), BACKGROUND, dtype=np.int32)

    for v, (x0, y0, x1, y1) in drawing.vertex_boxes.items():
        if v == BORDER:
            continue
        ri = np.searchsorted(row_arr, y0)
        rj = np.searchsorted(row_arr, y1, side="right")
        ci = np.searchsorted(col_arr, x0)
        cj = np.searchsorted(col_arr, x1, side="right")
        cells[ri:rj, ci:cj] = v

    for orig, path in drawing.edge_paths.items():
        a, b = orig
        s = splits.get(orig)
        for i, (x, y) in enumerate(path):
            ri, ci = row_of.get(y), col_of.get(x)
            if ri is None or ci is None:
                continue
            if a == BORDER:
                cells[ri, ci] = b
            else:
                cells[ri, ci] = a if i < s else b

    registry = {}
    for cell, origs in drawing.crossings.items():
        x, y = cell
        cells[row_of[y], col_of[x]] = CROSSING
        registry[(col_of[x], row_of[y])] = tuple(origs)
    return CellState(cells, registry, graph)


def compact(state: CellState) -> CellState:
    """Remove rows/columns identical to an adjacent one, to a fixpoint."""
    cells = state.cells
    orig_rows = np.arange(cells.shape[0])
    orig_cols = np.arange(cells.shape[1])
    while True:
        changed = False
        if cells.shape[0] > 1:
            keep = np.concatenate(
                [[True], np.any(cells[1:] != cells[:-1], axis=1)])
            if not keep.all():
                cells = cells[keep]
                orig_rows = orig_rows[keep]
                changed = True
        if cells.shape[1] > 1:
            keep = np.concatenate(
                [[True], np.any(cells[:, 1:] != cells[:, :-1], axis=0)])
            if not keep.all():
                cells = cells[:, keep]
                orig_cols = orig_cols[keep]
                changed = True
        if not changed:
            break
    registry = {}
    for (x, y), pairs in state.crossing_registry.items():
        nx_ = int(np.searchsorted(orig_cols, x))
        ny = int(np.searchsorted(orig_rows, y))
        registry[(nx_, ny)] = pairs
    return CellState(np.ascontiguousarray(cells), registry, state.origin_graph)


def select_initial_config(candidates: list[PlanarizedGraph],
                          graph: nx.Graph) -> CellState:
    """Draw and rasterize every candidate; keep the best valid one.

    Failures (routing, augmentation, memory cap, topology mismatch) skip
    the candidate; the survivor with the fewest crossing cells wins, ties
    broken by candidate index.
    """
    best = None
    for idx, cand in enumerate(candidates):
        try:
            drawing = orthogonal_draw(cand)
            state = compact(build_initial_config(drawing, graph))
        except LayoutError as exc:
            log.info("candidate %d failed: %s", idx, exc)
            continue
        ok, diff = validate_topology(state, graph)
        if not ok:
            log.info("candidate %d broke topology: %s", idx, diff)
            continue
        key = (state.num_crossings(), idx)
        if best is None or key < best[0]:
            best = (key, state)
        if key[0] <= cand.num_crossings():
            break  # no candidate can beat the planarization's crossing count
    if best is None:
        raise LayoutError("every layout candidate failed")
    return best[1]
