"""Quality measurement: adjacency extraction, deviations, topology checks.

This is the oracle layer: everything here reads states and statistics and
never mutates them.  Deviations are the signed differences between a
segment's (or contact's) relative share in the n-D input and its relative
share in the 2D embedding; all values are fractions, formatted as percent
only for display.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .labels import BORDER
from .ndgrid import SegmentStats
from .state import CellState


def extract_adjacency(state: CellState) -> nx.Graph:
    """Segment adjacency realized by a 2D state.

    Vertices are the segment ids present plus BORDER; an edge (i, j)
    exists iff cells of i and j share a von Neumann face, and (i, BORDER)
    iff i touches the grid border.  BACKGROUND and CROSSING cells confer
    no adjacency.
    """
    cells = state.cells
    graph = nx.Graph()
    graph.add_node(BORDER)
    for sid in np.unique(cells):
        if sid >= 0:
            graph.add_node(int(sid))

    def _pairs(a: np.ndarray, b: np.ndarray) -> None:
        mask = (a != b) & (a >= 0) & (b >= 0)
        if not mask.any():
            return
        for u, v in zip(a[mask].tolist(), b[mask].tolist()):
            graph.add_edge(int(u), int(v))

    _pairs(cells[:, :-1], cells[:, 1:])
    _pairs(cells[:-1, :], cells[1:, :])
    for edge in (cells[0, :], cells[-1, :], cells[:, 0], cells[:, -1]):
        for v in np.unique(edge):
            if v >= 0:
                graph.add_edge(int(v), BORDER)
    return graph


def boundary_lengths_2d(state: CellState) -> dict[tuple[int, int], int]:
    """Shared-face counts between segment pairs in a 2D state.

    Pairs with BORDER count grid-edge faces.  BACKGROUND and CROSSING
    faces are not counted anywhere.
    """
    cells = state.cells.astype(np.int64)
    counts: dict[tuple[int, int], int] = {}

    def _acc(a: np.ndarray, b: np.ndarray) -> None:
        mask = (a != b) & (a >= 0) & (b >= 0)
        for u, v in zip(a[mask].tolist(), b[mask].tolist()):
            key = (min(u, v), max(u, v))
            counts[key] = counts.get(key, 0) + 1

    _acc(cells[:, :-1], cells[:, 1:])
    _acc(cells[:-1, :], cells[1:, :])
    for edge in (cells[0, :], cells[-1, :], cells[:, 0], cells[:, -1]):
        for v in edge[edge >= 0].tolist():
            key = (BORDER, v)
            counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


def area_counts_2d(state: CellState) -> dict[int, int]:
    """Cell counts per segment id (sentinels excluded)."""
    flat = state.cells.reshape(-1)
    vals, cnts = np.unique(flat[flat >= 0], return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, cnts)}


def deviation_details(state: CellState, stats: SegmentStats):
    """Per-segment and per-contact deviation rows.

    Returns (per_segment, per_edge) where per_segment rows are
    (id, target_fraction, actual_fraction, |d_A|) and per_edge rows are
    ((a, b), target_fraction, actual_fraction, |d_L|).  The total 2D area
    is the full cell count of the state; the total 2D boundary length sums
    over all realized segment contacts including the grid border.
    """
    total_2d = state.width * state.height
    areas = area_counts_2d(state)
    per_segment = []
    for sid in sorted(stats.sizes):
        target = stats.sizes[sid] / stats.total_size
        actual = areas.get(sid, 0) / total_2d
        per_segment.append((sid, target, actual, abs(target - actual)))

    lengths = boundary_lengths_2d(state)
    total_len_2d = sum(lengths.values())
    per_edge = []
    for pair in sorted(stats.boundaries):
        target = stats.boundaries[pair] / stats.total_boundary
        actual = (lengths.get(pair, 0) / total_len_2d) if total_len_2d else 0.0
        per_edge.append((pair, target, actual, abs(target - actual)))
    return per_segment, per_edge


def mean_deviations(state: CellState, stats: SegmentStats) -> tuple[float, float]:
    """Mean absolute area and boundary-length deviations (fractions)."""
    per_segment, per_edge = deviation_details(state, stats)
    d_a = sum(row[3] for row in per_segment) / len(per_segment) if per_segment else 0.0
    d_l = sum(row[3] for row in per_edge) / len(per_edge) if per_edge else 0.0
    return d_a, d_l


def validate_topology(state: CellState, origin: nx.Graph):
    """Exact adjacency equality check.

    Returns (ok, diff) where diff lists ``missing_edges`` (in origin, not
    realized), ``extra_edges`` (realized, not in origin), and likewise for
    vertices.
    """
    realized = extract_adjacency(state)
    origin_edges = {tuple(sorted(e)) for e in origin.edges}
    realized_edges = {tuple(sorted(e)) for e in realized.edges}
    origin_nodes = set(origin.nodes)
    realized_nodes = set(realized.nodes)
    diff = {
        "missing_edges": sorted(origin_edges - realized_edges),
        "extra_edges": sorted(realized_edges - origin_edges),
        "missing_vertices": sorted(origin_nodes - realized_nodes),
        "extra_vertices": sorted(realized_nodes - origin_nodes),
    }
    ok = not any(diff.values())
    return ok, diff


@dataclass
class QualityReport:
    """Everything the pipeline reports about one embedding."""

    num_segments: int
    num_edges: int
    crossings: int
    mean_area_dev: float
    mean_boundary_dev: float
    resolution: tuple[int, int]
    per_segment: list = field(default_factory=list)
    per_edge: list = field(default_factory=list)
    iterations_used: int = 0
    timings: dict[str, float] = field(default_factory=dict)
    label_mapping: dict[int, int] = field(default_factory=dict)


def build_report(state: CellState, stats: SegmentStats, origin: nx.Graph,
                 iterations_used: int = 0, timings: dict | None = None,
                 label_mapping: dict | None = None) -> QualityReport:
    per_segment, per_edge = deviation_details(state, stats)
    d_a = sum(r[3] for r in per_segment) / len(per_segment) if per_segment else 0.0
    d_l = sum(r[3] for r in per_edge) / len(per_edge) if per_edge else 0.0
    return QualityReport(
        num_segments=len(stats.sizes),
        num_edges=origin.number_of_edges(),
        crossings=state.num_crossings(),
        mean_area_dev=d_a,
        mean_boundary_dev=d_l,
        resolution=state.resolution,
        per_segment=[list(r) for r in per_segment],
        per_edge=[[list(r[0]), r[1], r[2], r[3]] for r in per_edge],
        iterations_used=iterations_used,
        timings=dict(timings or {}),
        label_mapping=dict(label_mapping or {}),
    )


def emit_report(report: QualityReport, path) -> None:
    """Write the report as JSON and print a human-readable table."""
    payload = {
        "num_segments": report.num_segments,
        "num_edges": report.num_edges,
        "crossings": report.crossings,
        "mean_area_dev": report.mean_area_dev,
        "mean_boundary_dev": report.mean_boundary_dev,
        "resolution": list(report.resolution),
        "per_segment": report.per_segment,
        "per_edge": report.per_edge,
        "iterations_used": report.iterations_used,
        "timings": report.timings,
    }
    if report.label_mapping:
        payload["label_mapping"] = {str(k): v for k, v in report.label_mapping.items()}
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")
    print(format_report(report))


def load_report(path) -> dict:
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)


def format_report(report: QualityReport) -> str:
    lines = [
        f"segments: {report.num_segments}  contacts: {report.num_edges}  "
        f"crossings: {report.crossings}",
        f"resolution: {report.resolution[0]}x{report.resolution[1]}  "
        f"iterations: {report.iterations_used}",
        f"mean area deviation:     {100 * report.mean_area_dev:.4f}%",
        f"mean boundary deviation: {100 * report.mean_boundary_dev:.4f}%",
    ]
    if report.timings:
        parts = ", ".join(f"{k}={v:.2f}s" for k, v in report.timings.items())
        lines.append(f"timings: {parts}")
    return "\n".join(lines)
