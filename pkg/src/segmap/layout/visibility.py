"""Visibility representation: vertices as horizontal segments, edges vertical.

Classic construction: orient the (biconnected, embedded) graph by an
st-ordering whose (s, t) edge lies on the external face.  A vertex's row
is its longest-path distance from s; an edge's column is the longest-path
distance of the face left of it in the dual, where the external face is
split into a source (left outer region) and a sink (right outer region).
The left/right convention of the stored embedding is resolved empirically:
compute under one convention, validate the geometry, else mirror.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .planarize import LayoutError, enumerate_faces, sorted_edge
from .stnum import st_numbering

_SOURCE_FACE = ("*s*",)
_SINK_FACE = ("*t*",)


@dataclass
class VisibilityRep:
    """Integer coordinates: rows for vertices, columns for edges."""

    y: dict           # vertex -> row (0 = s, max = t)
    x: dict           # sorted planar edge -> column
    spans: dict       # vertex -> (min column, max column)
    y_max: int
    x_max: int
    st_edge: tuple
    st_pos: dict      # vertex -> st position


def _longest_paths(dag: nx.DiGraph, source) -> dict:
    dist = {source: 0}
    for v in nx.topological_sort(dag):
        base = dist.get(v)
        if base is None:
            continue
        for w in dag.successors(v):
            if dist.get(w, -1) < base + 1:
                dist[w] = base + 1
    return dist


def _validate(graph, y, x, spans) -> None:
    edges = [sorted_edge(u, v) for u, v in graph.edges]
    # (1) edges sharing a column must not overlap vertically
    for i, e1 in enumerate(edges):
        y1 = sorted((y[e1[0]], y[e1[1]]))
        for e2 in edges[i + 1:]:
            if x[e1] != x[e2]:
                continue
            y2 = sorted((y[e2[0]], y[e2[1]]))
            lo, hi = max(y1[0], y2[0]), min(y1[1], y2[1])
            if lo > hi:
                continue
            if lo < hi:
                raise LayoutError(f"edges {e1}/{e2} overlap at column {x[e1]}")
            shared = set(e1) & set(e2)
            if not any(y[v] == lo for v in shared):
                raise LayoutError(f"edges {e1}/{e2} touch at column {x[e1]}")
    # (2) an edge column must not pierce a non-incident vertex's span
    for e in edges:
        lo, hi = sorted((y[e[0]], y[e[1]]))
        for v in graph.nodes:
            if v in e:
                continue
            if lo < y[v] < hi and spans[v][0] <= x[e] <= spans[v][1]:
                raise LayoutError(f"edge {e} pierces vertex {v}")
    # (3) vertices on one row need disjoint spans
    nodes = sorted(graph.nodes, key=lambda v: (y[v], spans[v][0], v))
    for v, w in zip(nodes, nodes[1:]):
        if y[v] == y[w] and spans[w][0] <= spans[v][1]:
            raise LayoutError(f"vertices {v}/{w} overlap on row {y[v]}")


def visibility_representation(graph: nx.Graph, embedding: nx.PlanarEmbedding,
                              external_half_edge: tuple, s) -> VisibilityRep:
    """Build a visibility representation with s on the bottom row.

    ``external_half_edge`` is a half-edge whose face is the external one;
    s must lie on that face (t is taken as its successor on the walk).
    """
    face_of, walks = enumerate_faces(embedding)
    ext_key = face_of[external_half_edge]
    walk = walks[ext_key]
    succ = {he[0]: he[1] for he in walk}
    if s not in succ:
        raise LayoutError("source vertex not on the chosen external face")
    t = succ[s]
    st_pos = st_numbering(graph, s, t)
    st_edge = sorted_edge(s, t)

    # vertex rows: longest path from s over the st-orientation
    dag = nx.DiGraph()
    dag.add_nodes_from(graph.nodes)
    for u, v in graph.edges:
        if st_pos[u] < st_pos[v]:
            dag.add_edge(u, v)
        else:
            dag.add_edge(v, u)
    y = _longest_paths(dag, s)
    if len(y) != graph.number_of_nodes():
        raise LayoutError("orientation is not single-source")

    last_error = None
    for convention in (0, 1):
        def left_of(u, v):
            f = face_of[(u, v)] if convention == 0 else face_of[(v, u)]
            return f

        def face_node(f, side):
            if f != ext_key:
                return f
            return _SOURCE_FACE if side == "left" else _SINK_FACE

        dual = nx.DiGraph()
        dual.add_nodes_from(face_node(f, "left") for f in walks)
        dual.add_node(_SOURCE_FACE)
        dual.add_node(_SINK_FACE)
        x = {}
        try:
            for u, v in dag.edges:
                if sorted_edge(u, v) == st_edge:
                    continue
                lf = face_node(left_of(u, v), "left")
                rf = face_node(left_of(v, u), "right")
                dual.add_edge(lf, rf)
            if not nx.is_directed_acyclic_graph(dual):
                raise LayoutError("dual orientation is cyclic")
            xdist = _longest_paths(dual, _SOURCE_FACE)
            for u, v in dag.edges:
                lf = face_node(left_of(u, v), "left")
                if lf not in xdist:
                    raise LayoutError("left face unreachable in dual")
                x[sorted_edge(u, v)] = xdist[lf]
            spans = {}
            for v in graph.nodes:
                cols = [x[sorted_edge(v, n)] for n in graph.neighbors(v)]
                spans[v] = (min(cols), max(cols))
            _validate(graph, y, x, spans)
            return VisibilityRep(
                y=y, x=x, spans=spans,
                y_max=max(y.values()), x_max=max(x.values()),
                st_edge=st_edge, st_pos=st_pos,
            )
        except LayoutError as exc:
            last_error = exc
            continue
    raise LayoutError(f"no valid visibility representation: {last_error}")
