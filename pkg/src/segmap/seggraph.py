"""Weighted adjacency graph of segments, plus a border vertex.

Vertices are segment ids; a distinguished BORDER vertex represents the
grid surface so segments touching the outside keep that contact in 2D.
Edge weights are shared-face counts, which later steer both the layout
(heavier contacts are kept planar first) and the boundary-length targets.
"""

from __future__ import annotations

import networkx as nx

from .labels import BORDER
from .ndgrid import SegmentStats


def build_seggraph(stats: SegmentStats) -> nx.Graph:
    """Build the segment adjacency graph from grid statistics.

    Node attributes: ``size`` (cell count; 0 for BORDER).
    Edge attributes: ``weight`` (shared face count).
    """
    graph = nx.Graph()
    graph.add_node(BORDER, size=0)
    for sid, size in stats.sizes.items():
        graph.add_node(sid, size=size)
    for (a, b), count in stats.boundaries.items():
        graph.add_edge(a, b, weight=count)
    return graph


def origin_edges(graph: nx.Graph) -> list[tuple[int, int]]:
    """All adjacency pairs, BORDER contacts included, as sorted tuples."""
    return sorted(tuple(sorted(e)) for e in graph.edges)
