"""segmap: topology-exact 2D embeddings of n-dimensional segmentations.

Pipeline: load or generate an n-D labeled grid, build its segment
adjacency graph, compute a planar orthogonal drawing (inserting crossing
vertices where planarity fails), rasterize it into a cell grid, then run
a cellular-automaton optimizer that reshapes segments toward their n-D
area and boundary-length proportions without ever changing the adjacency
topology.  Results are rendered with cushion shading and scored by a
quality report.
"""

from .labels import BACKGROUND, BORDER, CROSSING
from .ndgrid import (
    GridFormatError,
    LabeledGrid,
    SegmentStats,
    compute_stats,
    generate_d1,
    generate_d2,
    load_grid,
    relabel_connected_components,
    save_grid,
)
from .seggraph import build_seggraph, origin_edges

__version__ = "0.1.0"

__all__ = [
    "BACKGROUND",
    "BORDER",
    "CROSSING",
    "GridFormatError",
    "LabeledGrid",
    "SegmentStats",
    "build_seggraph",
    "compute_stats",
    "generate_d1",
    "generate_d2",
    "load_grid",
    "origin_edges",
    "relabel_connected_components",
    "save_grid",
    "__version__",
]
