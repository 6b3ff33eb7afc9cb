"""Graph layout: planarization, orthogonal drawing, and a force baseline."""

from .force import force_layout_baseline
from .ortho import OrthoDrawing, orthogonal_draw, scale_factor
from .planarize import (
    LayoutError,
    PlanarizedGraph,
    choose_external_face,
    count_crossings,
    enumerate_faces,
    planarize,
)
from .stnum import st_numbering
from .visibility import visibility_representation

__all__ = [
    "LayoutError",
    "OrthoDrawing",
    "PlanarizedGraph",
    "choose_external_face",
    "count_crossings",
    "enumerate_faces",
    "force_layout_baseline",
    "orthogonal_draw",
    "planarize",
    "scale_factor",
    "st_numbering",
    "visibility_representation",
]
