"""Vectorized (numpy) marking pass: the automaton's hot inner loop.

For one phase this evaluates, for every active cell, the security gate,
the topology-criticality test, the area and boundary change criteria, and
the damping draw, and returns the proposed target label per cell (-1
where no change is proposed).  The compiled kernel implements the exact
same arithmetic; both must agree bit for bit.
"""

from __future__ import annotations

import numpy as np

from ..labels import BACKGROUND, CROSSING
from .rng import cell_draws
from .rules import EXTERIOR, MOORE_RING

KERNEL_NAME = "numpy"


def mark_phase(cells: np.ndarray, off_x: int, off_y: int,
               dev_lookup: np.ndarray, boundary_dev: np.ndarray,
               adjacency: np.ndarray, last_cell: np.ndarray,
               security_threshold: int, switch_prob: float,
               optimize_boundaries: bool, rng_base: int) -> np.ndarray:
    """Propose one phase of state changes; ``switch_prob`` is the shared
    damping gate (scaling factor times the current maximum deviation)."""
    height, width = cells.shape
    num = adjacency.shape[0] - 1   # border index

    padded = np.full((height + 2, width + 2), EXTERIOR, dtype=np.int32)
    padded[1:-1, 1:-1] = cells
    ring = [padded[1 + dy:height + 1 + dy, 1 + dx:width + 1 + dx]
            for dx, dy in MOORE_RING]
    own = cells

    transitions = np.zeros((height, width), dtype=np.int32)
    for i in range(8):
        transitions += ring[i] != ring[(i + 1) % 8]
    vn = (ring[0], ring[4], ring[6], ring[2])      # N, S, W, E
    diag = (ring[1], ring[3], ring[5], ring[7])

    same_face = sum((v == own).astype(np.int32) for v in vn)
    security = 3 * same_face + sum((d == own).astype(np.int32) for d in diag)

    crossing_adjacent = np.zeros((height, width), dtype=bool)
    for v in vn:
        crossing_adjacent |= v == CROSSING
    critical = ((own == CROSSING)
                | last_cell[own + 2].astype(bool)
                | crossing_adjacent
                | ((own != BACKGROUND) & (transitions > 3)))

    ys = np.arange(height)[:, None]
    xs = np.arange(width)[None, :]
    eligible = ((xs % 2 == off_x) & (ys % 2 == off_y)
                & ~critical & (security < security_threshold))

    own_dev = dev_lookup[own + 2]
    own_idx = np.maximum(own, 0)
    is_bg = own == BACKGROUND
    n_own = same_face

    best_sig = np.full((height, width), -np.inf)
    best_target = np.full((height, width), np.iinfo(np.int32).max,
                          dtype=np.int64)

    def consider(valid: np.ndarray, sig: np.ndarray, target: np.ndarray) -> None:
        nonlocal best_sig, best_target
        better = valid & ((sig > best_sig)
                          | ((sig == best_sig) & (target < best_target)))
        best_sig = np.where(better, sig, best_sig)
        best_target = np.where(better, target, best_target)

    for u in vn:
        u_idx = np.maximum(u, 0)
        base_valid = eligible & (u >= 0) & (u != own)

        # Area criterion: a neighbor whose segment is further under target
        # than the cell's own label may claim the cell.
        # exterior labels clip to slot 0; base_valid already excludes them
        sig_area = dev_lookup[np.maximum(u + 2, 0)] - own_dev
        valid = base_valid & (sig_area > 0.0)
        if valid.any():
            bg_ok = np.ones((height, width), dtype=bool)
            for v in vn:
                v_idx = np.maximum(v, 0)
                bg_ok &= ((v == BACKGROUND)
                          | ((v == EXTERIOR) & adjacency[u_idx, num].astype(bool))
                          | ((v >= 0) & ((v == u)
                                         | adjacency[u_idx, v_idx].astype(bool))))
            valid &= np.where(is_bg, bg_ok, True)
            consider(valid, sig_area, u.astype(np.int64))

        # Boundary criterion: flip when it moves the pair's contact length
        # toward its target.
        if optimize_boundaries:
            n_u = sum((w == u).astype(np.int32) for w in vn)
            dl = boundary_dev[own_idx, u_idx]
            valid = (base_valid & ~is_bg
                     & adjacency[own_idx, u_idx].astype(bool)
                     & (dl * (n_own - n_u) > 0.0))
            if valid.any():
                consider(valid, np.abs(dl), u.astype(np.int64))

    draws = cell_draws(rng_base, (ys * width + xs).astype(np.uint64))
    accept = (best_sig > -np.inf) & (draws < switch_prob)
    return np.where(accept, best_target, -1).astype(np.int32)
