"""Cell-level orthogonal drawing from a planarized candidate.

The drawing places every vertex as a filled box on the row band given by
the visibility representation and draws every original edge as a chain of
1-cell-wide vertical runs, connected through small routing regions where
the edge passes a crossing dummy or a bend.  Inside a crossing region the
two strands are routed by breadth-first search so that they intersect in
exactly one cell, which becomes the recorded crossing.  Border edges are
extended straight down to the bottom grid row so the segment's cells
reach the image border.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from ..labels import BORDER
from .planarize import LayoutError, PlanarizedGraph, sorted_edge
from .visibility import visibility_representation

_DIRS = ((0, -1), (0, 1), (-1, 0), (1, 0))


@dataclass
class OrthoDrawing:
    """Everything the rasterizer needs, in cell coordinates."""

    width: int
    height: int
    vertex_boxes: dict = field(default_factory=dict)   # real vertex -> rect
    edge_paths: dict = field(default_factory=dict)     # orig edge -> [cells]
    crossings: dict = field(default_factory=dict)      # cell -> (origA, origB)
    unit: int = 0


def scale_factor(base: nx.Graph) -> float:
    """Box scaling from the border vertex's degree."""
    return max(2.0, math.sqrt(base.degree(BORDER)))


# ---------------------------------------------------------------------------
# Biconnectivity augmentation
# ---------------------------------------------------------------------------

def _augment_biconnected(pg: PlanarizedGraph):
    """Add virtual chords until the graph is biconnected.

    A non-biconnected embedded graph has a face walk visiting some vertex
    twice; a chord between the two arcs of that walk (real vertices only,
    keeping the graph simple) merges two blocks.  Returns the set of
    virtual edges added.
    """
    graph = pg.graph
    skip = set(pg.dummies) | set(pg.bends)
    virtual = set()
    for _ in range(graph.number_of_nodes() + 1):
        if graph.number_of_nodes() < 3 or nx.is_biconnected(graph):
            return virtual
        ok, embedding = nx.check_planarity(graph)
        if not ok:
            raise LayoutError("augmentation broke planarity")
        from .planarize import enumerate_faces
        _face_of, walks = enumerate_faces(embedding)
        chord = None
        for key in sorted(walks):
            nodes = [he[0] for he in walks[key]]
            first_pos = {}
            dup = None
            for i, v in enumerate(nodes):
                if v in first_pos:
                    dup = (first_pos[v], i)
                    break
                first_pos[v] = i
            if dup is None:
                continue
            i, j = dup
            m = len(nodes)
            arc1 = [nodes[k % m] for k in range(i + 1, j)]
            arc2 = [nodes[k % m] for k in range(j + 1, i + m)]
            # prefer chords between real vertices; fall back to routing
            # vertices (the chord is virtual and never painted)
            for allow_regions in (False, True):
                for a in arc1:
                    for b in arc2:
                        if a == b or graph.has_edge(a, b):
                            continue
                        if not allow_regions and (a in skip or b in skip):
                            continue
                        chord = (a, b)
                        break
                    if chord:
                        break
                if chord:
                    break
            if chord:
                break
        if chord is None:
            raise LayoutError("cannot biconnect this candidate")
        graph.add_edge(*chord)
        virtual.add(sorted_edge(*chord))
    raise LayoutError("biconnectivity augmentation did not converge")


# ---------------------------------------------------------------------------
# Region routing
# ---------------------------------------------------------------------------

def _bfs_path(rect, start, goal, blocked):
    """Shortest orthogonal path within rect avoiding blocked cells."""
    x0, y0, x1, y1 = rect
    if start == goal:
        return [start]
    parent = {start: None}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for dx, dy in _DIRS:
            q = (p[0] + dx, p[1] + dy)
            if not (x0 <= q[0] <= x1 and y0 <= q[1] <= y1):
                continue
            if q in parent or q in blocked:
                continue
            parent[q] = p
            if q == goal:
                path = [q]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            queue.append(q)
    return None


def _straight_dirs(path):
    """Cells of a path where it runs straight, mapped to their axis."""
    axis = {}
    for i in range(1, len(path) - 1):
        px, py = path[i - 1]
        nx_, ny = path[i + 1]
        if px == nx_:
            axis[path[i]] = "v"
        elif py == ny:
            axis[path[i]] = "h"
    return axis


def _neighbors4(cell):
    return [(cell[0] + dx, cell[1] + dy) for dx, dy in _DIRS]


def _route_second(rect, start, goal, first_path):
    """Route the second strand, crossing the first exactly once.

    The second strand may only touch the first at one perpendicular
    pass-through of a straight cell; elsewhere it keeps a one-cell gap so
    the two strands' labels never become face-adjacent.
    """
    x0, y0, x1, y1 = rect
    first = set(first_path)
    halo = set()
    for c in first_path:
        for n in _neighbors4(c):
            if n not in first:
                halo.add(n)
    axis = _straight_dirs(first_path)
    start_state = (start, 0)
    parent = {start_state: None}
    queue = deque([start_state])
    goal_state = None
    while queue:
        state = queue.popleft()
        (px, py), crossed = state
        for dx, dy in _DIRS:
            q = (px + dx, py + dy)
            if not (x0 <= q[0] <= x1 and y0 <= q[1] <= y1):
                continue
            if q in first:
                continue
            if q in halo:
                # only as the first step of a perpendicular pass-through
                if crossed:
                    continue
                c = (q[0] + dx, q[1] + dy)
                h2 = (c[0] + dx, c[1] + dy)
                land = (h2[0] + dx, h2[1] + dy)
                want = "v" if dy == 0 else "h"
                if axis.get(c) != want:
                    continue
                if not (x0 <= land[0] <= x1 and y0 <= land[1] <= y1):
                    continue
                if h2 in first or land in first or land in halo:
                    continue
                # the pass-through cells may touch the first strand only
                # at the crossing itself, or the labels become adjacent
                if any(n in first and n != c for cell in (q, h2)
                       for n in _neighbors4(cell)):
                    continue
                nstate = (land, 1)
                if nstate in parent:
                    continue
                parent[nstate] = (state, (q, c, h2))
                if land == goal:
                    goal_state = nstate
                    break
                queue.append(nstate)
                continue
            nstate = (q, crossed)
            if nstate in parent:
                continue
            parent[nstate] = (state, None)
            if q == goal and crossed:
                goal_state = nstate
                break
            queue.append(nstate)
        if goal_state:
            break
    if goal_state is None:
        return None, None
    cells = []
    crossing = None
    cur = goal_state
    while parent[cur] is not None:
        prev, via = parent[cur]
        cells.append(cur[0])
        if via is not None:
            q, c, h2 = via
            cells.extend([h2, c, q])
            crossing = c
        cur = prev
    cells.append(start)
    cells.reverse()
    return cells, crossing


def _route_region(rect, strands):
    """Route one or two strands through a routing region.

    ``strands`` is a list of (start, end) boundary cells.  For two
    strands the result includes the single crossing cell.  Returns
    (paths, crossing) or raises LayoutError.
    """
    if len(strands) == 1:
        path = _bfs_path(rect, strands[0][0], strands[0][1], blocked=set())
        if path is None:
            raise LayoutError("bend routing failed")
        return [path], None
    for first, second in ((0, 1), (1, 0)):
        fs, fg = strands[first]
        ss, sg = strands[second]
        blocked = {ss, sg}
        for c in (ss, sg):
            blocked.update(_neighbors4(c))
        path1 = _bfs_path(rect, fs, fg, blocked)
        if path1 is None:
            continue
        path2, crossing = _route_second(rect, ss, sg, path1)
        if path2 is None:
            continue
        paths = [None, None]
        paths[first] = path1
        paths[second] = path2
        return paths, crossing
    raise LayoutError("crossing routing failed")


# ---------------------------------------------------------------------------
# Drawing assembly
# ---------------------------------------------------------------------------

def orthogonal_draw(candidate: PlanarizedGraph) -> OrthoDrawing:
    """Full cell-coordinate drawing for one external-face candidate."""
    virtual = _augment_biconnected(candidate)
    ok, embedding = nx.check_planarity(candidate.graph)
    if not ok:
        raise LayoutError("candidate graph is not planar")
    vis = visibility_representation(
        candidate.graph, embedding, candidate.external_half_edge, BORDER)

    f = scale_factor(candidate.base)
    unit = math.ceil(20 * f)
    pitch = 2 * unit

    def col(edge):
        return vis.x[edge] * pitch + unit

    def band(v):
        return (vis.y_max - vis.y[v]) * pitch + unit

    width = vis.x_max * pitch + unit + unit // 2 + 1
    height = vis.y_max * pitch + 3 * unit

    regions = set(candidate.dummies) | set(candidate.bends)
    drawing = OrthoDrawing(width=width, height=height, unit=unit)

    for v in candidate.graph.nodes:
        cols = [col(sorted_edge(v, n)) for n in candidate.graph.neighbors(v)]
        rect = (min(cols) - unit // 2, band(v),
                max(cols) + unit // 2, band(v) + unit - 1)
        if v not in regions:
            drawing.vertex_boxes[v] = rect

    def region_rect(w):
        cols = [col(sorted_edge(w, n)) for n in candidate.graph.neighbors(w)]
        return (min(cols) - unit // 2, band(w),
                max(cols) + unit // 2, band(w) + unit - 1)

    # strand attachments through each region, in edge-path direction
    def strand_ends(w, orig):
        path = candidate.paths[orig]
        i = path.index(w)
        prev_v, next_v = path[i - 1], path[i + 1]
        c_in = col(sorted_edge(prev_v, w))
        c_out = col(sorted_edge(w, next_v))
        top, bottom = band(w), band(w) + unit - 1
        start = (c_in, bottom if band(prev_v) > band(w) else top)
        end = (c_out, bottom if band(next_v) > band(w) else top)
        return start, end

    region_paths = {}
    for w in sorted(regions, reverse=True):
        rect = region_rect(w)
        if w in candidate.dummies:
            origs = candidate.dummies[w]
            strands = [strand_ends(w, o) for o in origs]
            paths, crossing = _route_region(rect, strands)
            if crossing is None:
                raise LayoutError("crossing region produced no crossing")
            drawing.crossings[crossing] = tuple(origs)
        else:
            orig = next(o for o, p in candidate.paths.items() if w in p)
            origs = (orig,)
            paths, _none = _route_region(rect, [strand_ends(w, orig)])
        for o, p in zip(origs, paths):
            region_paths[(w, o)] = p

    # assemble full edge cell paths
    for orig, path in candidate.paths.items():
        cells = []
        a, b = orig
        if a == BORDER:
            # extension from the bottom grid row up through the border band
            c0 = col(sorted_edge(path[0], path[1]))
            for row in range(height - 1, band(BORDER) - 1, -1):
                cells.append((c0, row))
        for i in range(len(path) - 1):
            p, q = path[i], path[i + 1]
            c = col(sorted_edge(p, q))
            if band(p) > band(q):       # q above p: ascend
                rows = range(band(p) - 1, band(q) + unit - 1, -1)
            else:                        # q below p: descend
                rows = range(band(p) + unit, band(q))
            cells.extend((c, r) for r in rows)
            if q in regions and i + 1 < len(path) - 1:
                cells.extend(region_paths[(q, orig)])
        drawing.edge_paths[orig] = cells

    # virtual augmentation edges are never painted; make sure none leaked
    for e in virtual:
        drawing.edge_paths.pop(e, None)
    return drawing
