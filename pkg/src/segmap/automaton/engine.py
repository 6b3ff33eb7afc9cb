"""The optimizing automaton: phase updates, crossing motion and removal.

One iteration marks every active cell of the current phase (kernel),
applies the accepted changes sequentially with live topology vetoes, and
then lets each crossing slide one cell toward the barycenter of its
strands.  Every ``removal_interval`` iterations redundant crossings are
collected.  Adjacency topology is preserved exactly throughout: the
marking rules make local breaks impossible and the apply pass vetoes any
change that would empty a segment or erase a required contact.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import ndimage

from ..labels import BACKGROUND, BORDER, CROSSING
from ..metrics import validate_topology
from ..ndgrid import SegmentStats
from ..state import CellState
from .kernels import mark_phase
from .params import AutomatonParams
from .rng import phase_base
from .tables import DeviationTables, _pair_index

log = logging.getLogger(__name__)

PHASES = ((0, 0), (1, 0), (0, 1), (1, 1))
_VN = ((0, -1), (0, 1), (-1, 0), (1, 0))


def _face_deltas(cells: np.ndarray, x: int, y: int, old: int, new: int):
    """Net contact-length changes from relabeling one cell.

    Off-grid faces count toward BORDER; background and crossing neighbors
    carry no contacts.
    """
    height, width = cells.shape
    deltas: dict[tuple[int, int], int] = {}
    for dx, dy in _VN:
        nx_, ny_ = x + dx, y + dy
        if 0 <= nx_ < width and 0 <= ny_ < height:
            v = int(cells[ny_, nx_])
            if v < 0:
                continue
        else:
            v = BORDER
        if old >= 0 and v != old:
            key = (min(old, v), max(old, v))
            deltas[key] = deltas.get(key, 0) - 1
        if new >= 0 and v != new:
            key = (min(new, v), max(new, v))
            deltas[key] = deltas.get(key, 0) + 1
    return deltas


def _veto(tables: DeviationTables, old: int,
          deltas: dict[tuple[int, int], int]) -> bool:
    """Live topology guard for one proposed relabeling."""
    if old >= 0 and tables.area_2d[old] <= 1:
        return True
    num = tables.num_segments
    for (a, b), delta in deltas.items():
        i, j = _pair_index(a, num), _pair_index(b, num)
        if delta < 0 and tables.adjacency[i, j] and tables.pair_2d[i, j] + delta <= 0:
            return True
        if delta > 0 and not tables.adjacency[i, j]:
            return True
    return False


def step(cs: CellState, stats: SegmentStats, params: AutomatonParams,
         tables: DeviationTables, iteration: int):
    """One phase: mark active cells, then apply survivors in cell order."""
    off_x, off_y = PHASES[iteration % 4]
    area_dev = tables.area_dev()
    max_dev = float(np.abs(area_dev).max()) if area_dev.size else 0.0
    if params.optimize_boundaries:
        boundary_dev = tables.boundary_dev()
        if boundary_dev.size:
            max_dev = max(max_dev, float(np.abs(boundary_dev).max()))
    else:
        boundary_dev = np.zeros_like(tables.target_len)
    # The damping gate is shared by every proposed change: the scaling
    # factor times the largest current deviation anywhere.  It weakens as
    # the embedding gets accurate, which suppresses oscillation.
    switch_prob = params.damping_factor * max_dev
    targets = mark_phase(
        cs.cells, off_x, off_y,
        tables.area_dev_lookup(), boundary_dev,
        tables.adjacency.astype(np.uint8), tables.last_cell_lookup(),
        params.security_threshold, switch_prob,
        params.optimize_boundaries, phase_base(params.rng_seed, iteration))

    width = cs.width
    changed = 0
    for idx in np.flatnonzero(targets.ravel() >= 0).tolist():
        y, x = divmod(idx, width)
        old = int(cs.cells[y, x])
        new = int(targets[y, x])
        deltas = _face_deltas(cs.cells, x, y, old, new)
        if _veto(tables, old, deltas):
            continue
        cs.cells[y, x] = new
        tables.apply_change(x, y, old, new, deltas)
        changed += 1
    return cs, changed > 0


def _strands_at(cells: np.ndarray, x: int, y: int) -> tuple[int, int]:
    """(vertical, horizontal) strand labels of a crossing cell."""
    return int(cells[y - 1, x]), int(cells[y, x - 1])


def move_crossings(cs: CellState, tables: DeviationTables) -> int:
    """Slide each crossing toward its strands' combined barycenter.

    A move swaps the crossing with an adjacent strand cell and is allowed
    only where the perpendicular strand also spans the destination row or
    column, which keeps every contact count and both strands' connectivity
    unchanged by construction.  Distances compare exactly in integers.
    """
    cells = cs.cells
    height, width = cells.shape
    moved = 0
    for (x, y) in sorted(cs.crossing_registry):
        s_vert, s_horz = _strands_at(cells, x, y)
        involved = {s_vert, s_horz}
        count = int(sum(tables.area_2d[u] for u in involved))
        sx = int(sum(tables.sum_x[u] for u in involved))
        sy = int(sum(tables.sum_y[u] for u in involved))

        def dist2(px: int, py: int) -> int:
            return (px * count - sx) ** 2 + (py * count - sy) ** 2

        def label(px: int, py: int) -> int:
            if 0 <= px < width and 0 <= py < height:
                return int(cells[py, px])
            return BORDER  # off-grid: never equal to a strand label

        best = dist2(x, y)
        best_dir = None
        for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):   # N, E, S, W
            qx, qy = x + dx, y + dy
            along = s_vert if dx == 0 else s_horz
            across = s_horz if dx == 0 else s_vert
            ex, ey = (1, 0) if dx == 0 else (0, 1)
            if (label(qx + dx, qy + dy) == along
                    and label(qx + ex, qy + ey) == across
                    and label(qx - ex, qy - ey) == across):
                d2 = dist2(qx, qy)
                if d2 < best:
                    best = d2
                    best_dir = (dx, dy)
        if best_dir is None:
            continue
        dx, dy = best_dir
        qx, qy = x + dx, y + dy
        along = s_vert if dx == 0 else s_horz
        cells[qy, qx] = CROSSING
        cells[y, x] = along
        tables.sum_x[along] += x - qx
        tables.sum_y[along] += y - qy
        cs.crossing_registry[(qx, qy)] = cs.crossing_registry.pop((x, y))
        moved += 1
    return moved


def _segments_connected(cells: np.ndarray, registry: dict) -> bool:
    """Every segment forms one component, crossings acting as bridges."""
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    for sid in np.unique(cells[cells >= 0]).tolist():
        comp, n = ndimage.label(cells == sid, structure=structure)
        if n <= 1:
            continue
        parent = list(range(n + 1))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for (x, y) in registry:
            for (ax, ay), (bx, by) in (((x, y - 1), (x, y + 1)),
                                       ((x - 1, y), (x + 1, y))):
                if cells[ay, ax] == sid and cells[by, bx] == sid:
                    ra, rb = find(int(comp[ay, ax])), find(int(comp[by, bx]))
                    parent[ra] = rb
        roots = {find(r) for r in range(1, n + 1)}
        if len(roots) > 1:
            return False
    return True


def _try_removal(cs: CellState, p: tuple[int, int],
                 arm: tuple[int, int] | None):
    """Tentatively delete a crossing (plus optionally one strand arm).

    Returns (cells, registry) of the modified copy if the result keeps the
    extracted adjacency and every segment's connectivity intact, else None.
    """
    cells = cs.cells.copy()
    registry = dict(cs.crossing_registry)
    x, y = p
    doomed = {p}
    if arm is not None:
        # Flood the arm's strand component without passing through p;
        # other crossings act as bridges for the same label.
        ax, ay = x + arm[0], y + arm[1]
        sid = int(cells[ay, ax])
        height, width = cells.shape
        stack = [(ax, ay)]
        comp = set()
        while stack:
            cx, cy = stack.pop()
            if (cx, cy) in comp or (cx, cy) == p:
                continue
            comp.add((cx, cy))
            for dx, dy in _VN:
                nx_, ny_ = cx + dx, cy + dy
                if not (0 <= nx_ < width and 0 <= ny_ < height):
                    continue
                here = int(cells[ny_, nx_])
                if here == sid and (nx_, ny_) not in comp:
                    stack.append((nx_, ny_))
                elif here == CROSSING and (nx_, ny_) != p:
                    # jump across the crossing if our strand runs through it
                    ox, oy = nx_ + dx, ny_ + dy
                    if (0 <= ox < width and 0 <= oy < height
                            and cells[oy, ox] == sid):
                        stack.append((ox, oy))
        for cell in comp:
            cells[cell[1], cell[0]] = BACKGROUND
    cells[y, x] = BACKGROUND
    registry.pop(p)

    # Cascade: crossings left with a background strand side are invalid
    # and go away too.
    while True:
        broken = [q for q in registry
                  if any(cells[q[1] + dy, q[0] + dx] == BACKGROUND
                         for dx, dy in _VN)]
        if not broken:
            break
        for q in broken:
            cells[q[1], q[0]] = BACKGROUND
            registry.pop(q)

    trial = CellState(cells, registry, cs.origin_graph)
    ok, _ = validate_topology(trial, cs.origin_graph)
    if ok and _segments_connected(cells, registry):
        return cells, registry
    return None


def remove_redundant_crossings(cs: CellState, params: AutomatonParams) -> int:
    """Delete crossings whose adjacency contribution is replicated.

    Covers both duplicate crossings of the same strand pair (the cut strand
    stays connected through the twin crossing) and crossings on dead-end
    branches whose contacts exist elsewhere; every candidate is verified
    against the full adjacency extraction and reverted unless it is exact.
    """
    removed = 0
    progress = True
    while progress:
        progress = False
        for p in sorted(cs.crossing_registry):
            for arm in (None, (0, -1), (1, 0), (0, 1), (-1, 0)):
                result = _try_removal(cs, p, arm)
                if result is None:
                    continue
                before = len(cs.crossing_registry)
                cs.cells[...] = result[0]
                cs.crossing_registry.clear()
                cs.crossing_registry.update(result[1])
                removed += before - len(cs.crossing_registry)
                progress = True
                break
            if progress:
                break
    return removed


def run(cs: CellState, stats: SegmentStats, params: AutomatonParams,
        frames_every: int = 0, frame_callback=None):
    """Drive the automaton to convergence or the iteration budget.

    Returns (state, iterations_used).  Raises if the final state's
    extracted adjacency differs from the origin graph (it cannot, by
    construction, but the invariant is load-bearing enough to check).
    """
    tables = DeviationTables.from_state(cs, stats)
    quiet = 0
    used = 0
    for it in range(params.max_iterations):
        cs, changed = step(cs, stats, params, tables, it)
        moved = move_crossings(cs, tables)
        removed = 0
        if (it + 1) % params.removal_interval == 0:
            removed = remove_redundant_crossings(cs, params)
            if removed:
                log.info("iteration %d: removed %d crossings", it + 1, removed)
                tables = DeviationTables.from_state(cs, stats)
            else:
                tables.audit(cs, stats)
        used = it + 1
        if frames_every and frame_callback and used % frames_every == 0:
            frame_callback(cs, used)
        quiet = 0 if (changed or moved or removed) else quiet + 1
        if quiet >= params.stop_patience:
            break
    ok, diff = validate_topology(cs, cs.origin_graph)
    if not ok:
        raise RuntimeError(f"adjacency drifted during optimization: {diff}")
    return cs, used
