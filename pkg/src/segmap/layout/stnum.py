"""st-ordering of a biconnected graph by incremental ear insertion.

An st-ordering lists the vertices so that s is first, t is last, and
every other vertex has both an earlier and a later neighbor.  Starting
from [s, t] (requires the edge (s, t)), repeatedly find an ear — a path
between two already-placed vertices whose interior is unplaced — and
splice its interior right after the earlier endpoint.  Each interior
vertex then has an earlier neighbor (its predecessor on the ear) and a
later one (its successor), so the invariant is maintained.
"""

from __future__ import annotations

from collections import deque

import networkx as nx

from .planarize import LayoutError


def _find_ear(graph: nx.Graph, order: list, placed: set):
    """First ear by scan order: (placed endpoint, interior path, placed endpoint)."""
    for a in order:
        for u in sorted(graph.neighbors(a)):
            if u in placed:
                continue
            # BFS from u through unplaced vertices, avoiding a, until some
            # other placed vertex is reached.
            parent = {u: None}
            queue = deque([u])
            while queue:
                w = queue.popleft()
                for n in sorted(graph.neighbors(w)):
                    if n == a or n in parent:
                        continue
                    if n in placed:
                        path = [w]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        path.reverse()
                        return a, path, n
                    parent[n] = w
                    queue.append(n)
    return None


def st_numbering(graph: nx.Graph, s, t) -> dict:
    """Map vertex -> position (0..n-1) with s first and t last.

    Requires the edge (s, t) and a biconnected graph.
    """
    if not graph.has_edge(s, t):
        raise LayoutError(f"st-ordering needs the edge ({s}, {t})")
    order = [s, t]
    placed = {s, t}
    n = graph.number_of_nodes()
    while len(order) < n:
        ear = _find_ear(graph, order, placed)
        if ear is None:
            raise LayoutError("graph is not biconnected; no ear found")
        a, interior, b = ear
        ia, ib = order.index(a), order.index(b)
        seq = interior if ia < ib else list(reversed(interior))
        at = min(ia, ib) + 1
        order[at:at] = seq
        placed.update(seq)
    return {v: i for i, v in enumerate(order)}
