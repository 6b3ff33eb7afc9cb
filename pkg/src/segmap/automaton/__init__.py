"""Topology-preserving optimization of 2D embeddings."""

from .engine import (move_crossings, remove_redundant_crossings, run, step)
from .kernels import KERNEL_NAME, mark_phase
from .params import AutomatonParams
from .rules import (area_deviation, boundary_deviation,
                    delta_boundary_length, is_topology_critical,
                    moore_transitions, security_factor)
from .tables import DeviationTables

__all__ = [
    "AutomatonParams", "DeviationTables", "KERNEL_NAME",
    "area_deviation", "boundary_deviation", "delta_boundary_length",
    "is_topology_critical", "mark_phase", "moore_transitions",
    "move_crossings", "remove_redundant_crossings", "run",
    "security_factor", "step",
]
