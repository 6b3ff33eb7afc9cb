"""Planarization: embed the segment graph, inserting crossing vertices.

A maximal planar subgraph is grown greedily by descending edge weight, so
the heaviest contacts are guaranteed crossing-free.  Each rejected edge is
then routed along a shortest path in the face-adjacency (dual) graph of
the current embedding; every crossed edge is subdivided by a degree-4
dummy vertex.  A cleanup pass dissolves dummies whose cyclic neighbor
order does not alternate between their two original edges (those are
touch points, not crossings, and the graph stays planar without them).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from ..labels import BORDER


class LayoutError(RuntimeError):
    """A drawing stage could not satisfy its contract for this candidate."""


# Dummy/bend vertex ids descend from here to stay clear of segment ids
# (>= 0) and the sentinel labels (-1..-3).
_FIRST_DUMMY = -10


def sorted_edge(u, v) -> tuple:
    return (u, v) if u < v else (v, u)


def enumerate_faces(embedding: nx.PlanarEmbedding):
    """All faces of an embedding.

    Returns (face_of, walks): ``face_of`` maps each half-edge to its
    face's canonical key (the minimum half-edge on the walk), ``walks``
    maps each key to the ordered list of half-edges of the walk.
    """
    face_of: dict = {}
    walks: dict = {}
    for half_edge in sorted(embedding.edges):
        if half_edge in face_of:
            continue
        nodes = embedding.traverse_face(*half_edge)
        hes = list(zip(nodes, nodes[1:] + [nodes[0]]))
        key = min(hes)
        for he in hes:
            face_of[he] = key
        walks[key] = hes
    return face_of, walks


@dataclass
class PlanarizedGraph:
    """A planar graph whose dummy vertices stand for edge crossings.

    ``paths`` expands every original edge into its chain of planar
    vertices (real endpoints, with dummies/bends in between); ``dummies``
    maps each crossing vertex to the two original edges that cross there;
    ``bends`` are degree-2 path vertices left over from dissolved touch
    points.  ``external_face`` is set per candidate by
    choose_external_face and identified by one BORDER half-edge on it.
    """

    base: nx.Graph
    graph: nx.Graph
    embedding: nx.PlanarEmbedding
    paths: dict[tuple, list] = field(default_factory=dict)
    dummies: dict[int, tuple] = field(default_factory=dict)
    bends: set = field(default_factory=set)
    external_half_edge: tuple | None = None

    def edge_origin(self) -> dict:
        origin = {}
        for orig, path in self.paths.items():
            for p, q in zip(path, path[1:]):
                origin[sorted_edge(p, q)] = orig
        return origin

    def num_crossings(self) -> int:
        return len(self.dummies)


def _dual_route(embedding: nx.PlanarEmbedding, a, b):
    """Fewest-crossings route for a new edge (a, b) across an embedding.

    Returns the ordered list of primal edges to cross (possibly empty).
    Works on the face-adjacency graph: nodes are faces, moves cross one
    primal edge.  Deterministic via sorted expansion.
    """
    face_of, walks = enumerate_faces(embedding)
    start_faces = sorted({face_of[he] for he in face_of if he[0] == a})
    end_faces = {face_of[he] for he in face_of if he[0] == b}
    # parent: face -> (previous face, crossed primal edge)
    parent: dict = {}
    queue = deque()
    for f in start_faces:
        parent[f] = None
        queue.append(f)
    goal = None
    while queue:
        f = queue.popleft()
        if f in end_faces:
            goal = f
            break
        crossables = sorted(
            {sorted_edge(u, v) for (u, v) in walks[f] if u != b and v != b})
        for edge in crossables:
            u, v = edge
            other = face_of[(v, u)] if face_of[(u, v)] == f else face_of[(u, v)]
            if other not in parent:
                parent[other] = (f, edge)
                queue.append(other)
    if goal is None:
        raise LayoutError(f"no dual route for edge ({a}, {b})")
    crossed = []
    cur = goal
    while parent[cur] is not None:
        prev, edge = parent[cur]
        crossed.append(edge)
        cur = prev
    crossed.reverse()
    return crossed


def _subdivide(pg: PlanarizedGraph, planar_edge: tuple, dummy) -> None:
    """Replace a planar edge by two edges through a new vertex."""
    origin = pg.edge_origin()[planar_edge]
    u, v = planar_edge
    pg.graph.remove_edge(u, v)
    pg.graph.add_edge(u, dummy)
    pg.graph.add_edge(dummy, v)
    path = pg.paths[origin]
    for i in range(len(path) - 1):
        if sorted_edge(path[i], path[i + 1]) == planar_edge:
            path.insert(i + 1, dummy)
            return
    raise LayoutError(f"edge {planar_edge} not on path of {origin}")


def _insert_edge(pg: PlanarizedGraph, orig: tuple, next_id: int) -> int:
    """Insert a rejected original edge, creating crossing dummies."""
    a, b = orig
    is_planar, embedding = nx.check_planarity(pg.graph)
    assert is_planar
    crossed = _dual_route(embedding, a, b)
    chain = [a]
    for planar_edge in crossed:
        dummy = next_id
        next_id -= 1
        crossed_origin = pg.edge_origin()[planar_edge]
        _subdivide(pg, planar_edge, dummy)
        pg.dummies[dummy] = (crossed_origin, orig)
        chain.append(dummy)
    chain.append(b)
    for p, q in zip(chain, chain[1:]):
        pg.graph.add_edge(p, q)
    pg.paths[orig] = chain
    ok, _ = nx.check_planarity(pg.graph)
    if not ok:
        raise LayoutError(f"inserting edge {orig} broke planarity")
    return next_id


def _alternation_violators(pg: PlanarizedGraph) -> list:
    """Dummies whose cyclic neighbor order is not (A, B, A, B)."""
    origin = pg.edge_origin()
    bad = []
    for dummy in sorted(pg.dummies, reverse=True):
        ring = [origin[sorted_edge(dummy, n)]
                for n in pg.embedding.neighbors_cw_order(dummy)]
        if len(ring) != 4 or ring[0] != ring[2] or ring[1] != ring[3] \
                or ring[0] == ring[1]:
            bad.append(dummy)
    return bad


def _dissolve(pg: PlanarizedGraph, dummy, next_id: int) -> int:
    """Remove a touch-point dummy, reconnecting both strands."""
    strands = pg.dummies.pop(dummy)
    pg.graph.remove_node(dummy)
    for orig in strands:
        path = pg.paths[orig]
        i = path.index(dummy)
        p, q = path[i - 1], path[i + 1]
        if pg.graph.has_edge(p, q) or p == q:
            # keep a degree-2 bend so the graph stays simple
            bend = next_id
            next_id -= 1
            path[i] = bend
            pg.graph.add_edge(p, bend)
            pg.graph.add_edge(bend, q)
            pg.bends.add(bend)
        else:
            del path[i]
            pg.graph.add_edge(p, q)
    return next_id


def planarize(graph: nx.Graph) -> PlanarizedGraph:
    """Planar embedding of the segment graph with crossing dummies.

    Greedy maximal planar subgraph by descending weight (ties by endpoint
    ids), then dual-route insertion of the rejected edges, then
    dissolution of non-alternating dummies.
    """
    edges = sorted(graph.edges(data="weight"),
                   key=lambda e: (-e[2], sorted_edge(e[0], e[1])))
    sub = nx.Graph()
    sub.add_nodes_from(graph.nodes)
    pg = PlanarizedGraph(base=graph, graph=sub,
                         embedding=nx.PlanarEmbedding())
    rejected = []
    for u, v, _w in edges:
        sub.add_edge(u, v)
        ok, _ = nx.check_planarity(sub)
        if ok:
            pg.paths[sorted_edge(u, v)] = [*sorted_edge(u, v)]
        else:
            sub.remove_edge(u, v)
            rejected.append(sorted_edge(u, v))

    next_id = _FIRST_DUMMY
    for orig in rejected:
        next_id = _insert_edge(pg, orig, next_id)

    # dissolve touch points until every dummy is a true crossing
    for _ in range(len(pg.dummies) + 1):
        _, pg.embedding = nx.check_planarity(pg.graph)
        bad = _alternation_violators(pg)
        if not bad:
            break
        for dummy in bad:
            next_id = _dissolve(pg, dummy, next_id)
    else:
        raise LayoutError("alternation cleanup did not converge")
    return pg


def choose_external_face(pg: PlanarizedGraph) -> list[PlanarizedGraph]:
    """One candidate per face incident to the border vertex."""
    face_of, _walks = enumerate_faces(pg.embedding)
    seen = set()
    candidates = []
    for he in sorted(h for h in face_of if h[0] == BORDER):
        key = face_of[he]
        if key in seen:
            continue
        seen.add(key)
        cand = PlanarizedGraph(
            base=pg.base,
            graph=pg.graph.copy(),
            embedding=pg.embedding,
            paths={k: list(v) for k, v in pg.paths.items()},
            dummies=dict(pg.dummies),
            bends=set(pg.bends),
            external_half_edge=he,
        )
        candidates.append(cand)
    return candidates


def count_crossings(drawing) -> int:
    """Number of transversal intersections in a drawing."""
    return len(drawing.crossings)
