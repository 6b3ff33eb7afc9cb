"""Force-directed node-link baseline layout for comparison figures.

A Fruchterman-Reingold variant in the unit square: the ideal pairwise
distance k is replaced by k0 + r_i + r_j so the circles that represent
vertices get enough room, the square's walls push vertices inward, and
every border-connected vertex gets a ghost partner pinned to the nearest
wall point.  This layout is purely for side-by-side pictures; the main
pipeline never uses it.
"""

from __future__ import annotations

import math

import networkx as nx
import numpy as np

from ..labels import BORDER

MAX_RADIUS = 0.1


def _radii(graph: nx.Graph) -> dict[int, float]:
    """Circle radii from vertex sizes, largest normalized to 0.1."""
    sizes = {v: max(graph.nodes[v].get("size", 0), 0) for v in graph
             if v != BORDER}
    top = max(math.sqrt(s) for s in sizes.values()) or 1.0
    return {v: MAX_RADIUS * math.sqrt(s) / top for v, s in sizes.items()}


def _nearest_wall(p: np.ndarray) -> np.ndarray:
    """Closest point on the unit-square boundary to p."""
    x, y = float(p[0]), float(p[1])
    candidates = [(x, 0.0), (x, 1.0), (0.0, y), (1.0, y)]
    return np.array(min(candidates,
                        key=lambda q: (q[0] - x) ** 2 + (q[1] - y) ** 2))


def force_layout_baseline(graph: nx.Graph, iterations: int = 1000,
                          step: float = 0.001, seed: int = 0):
    """Positions and radii for the node-link rendition of the graph.

    Returns {vertex: ((x, y), radius)} for all non-border vertices, with
    every position strictly inside the unit square.
    """
    vertices = sorted(v for v in graph if v != BORDER)
    radii = _radii(graph)
    k0 = math.sqrt(1.0 / len(vertices))
    rng = np.random.default_rng(seed)
    pos = {v: 0.2 + 0.6 * rng.random(2) for v in vertices}
    ghosts = {v for v in vertices if graph.has_edge(v, BORDER)}

    eps = 1e-6
    for _ in range(iterations):
        disp = {v: np.zeros(2) for v in vertices}
        # pairwise repulsion with size-aware ideal distance
        for i, u in enumerate(vertices):
            for v in vertices[i + 1:]:
                delta = pos[u] - pos[v]
                dist = max(float(np.hypot(*delta)), eps)
                k = k0 + radii[u] + radii[v]
                force = (k * k / dist) * (delta / dist)
                disp[u] += force
                disp[v] -= force
        # attraction along edges
        for u, v in graph.edges:
            if BORDER in (u, v):
                continue
            delta = pos[u] - pos[v]
            dist = max(float(np.hypot(*delta)), eps)
            k = k0 + radii[u] + radii[v]
            force = (dist * dist / k) * (delta / dist)
            disp[u] -= force
            disp[v] += force
        # ghost partners pinned to the nearest wall pull border vertices out
        for v in ghosts:
            wall = _nearest_wall(pos[v])
            delta = pos[v] - wall
            dist = max(float(np.hypot(*delta)), eps)
            k = k0 + radii[v]
            disp[v] -= (dist * dist / k) * (delta / dist)
        # the walls repel everyone, falling off with squared distance
        for v in vertices:
            x, y = pos[v]
            x = min(max(x, eps), 1 - eps)
            y = min(max(y, eps), 1 - eps)
            strength = (radii[v] + k0) ** 2
            disp[v] += strength * np.array([1 / x ** 2 - 1 / (1 - x) ** 2,
                                            1 / y ** 2 - 1 / (1 - y) ** 2])

        for v in vertices:
            d = disp[v]
            norm = max(float(np.hypot(*d)), eps)
            pos[v] = pos[v] + (d / norm) * min(norm, step)
            pos[v] = np.clip(pos[v], 2 * eps, 1 - 2 * eps)
        step *= 0.99   # simulated-annealing style decay

    return {v: ((float(pos[v][0]), float(pos[v][1])), radii[v])
            for v in vertices}
