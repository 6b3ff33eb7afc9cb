# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled marking pass: per-cell translation of the numpy kernel.

The Python wrapper (``kernel_py``) documents the rules; this file must
produce bit-identical proposals for the same inputs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

KERNEL_NAME = "cython"

DEF BACKGROUND = -1
DEF CROSSING = -2
DEF EXTERIOR = -99

cdef unsigned long long MASK = 0xFFFFFFFFFFFFFFFFULL
cdef unsigned long long GAMMA = 0x9E3779B97F4A7C15ULL
cdef unsigned long long M1 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long M2 = 0x94D049BB133111EBULL
cdef double SCALE = 1.0 / 9007199254740992.0   # 2 ** -53

# Clockwise Moore ring starting north, (dx, dy) with y growing downward.
cdef int RING_DX[8]
cdef int RING_DY[8]
RING_DX[0] = 0;  RING_DY[0] = -1
RING_DX[1] = 1;  RING_DY[1] = -1
RING_DX[2] = 1;  RING_DY[2] = 0
RING_DX[3] = 1;  RING_DY[3] = 1
RING_DX[4] = 0;  RING_DY[4] = 1
RING_DX[5] = -1; RING_DY[5] = 1
RING_DX[6] = -1; RING_DY[6] = 0
RING_DX[7] = -1; RING_DY[7] = -1

# von Neumann order N, S, W, E as ring indices.
cdef int VN_RING[4]
VN_RING[0] = 0
VN_RING[1] = 4
VN_RING[2] = 6
VN_RING[3] = 2


cdef inline unsigned long long _mix(unsigned long long z) nogil:
    z = z + GAMMA
    z ^= z >> 30
    z = z * M1
    z ^= z >> 27
    z = z * M2
    z ^= z >> 31
    return z


cdef inline double _draw(unsigned long long base, unsigned long long idx) nogil:
    return <double> (_mix(base + idx) >> 11) * SCALE


cdef inline int _label(const int[:, ::1] cells, int height, int width,
                       int x, int y) nogil:
    if 0 <= x < width and 0 <= y < height:
        return cells[y, x]
    return EXTERIOR


def mark_phase(const int[:, ::1] cells, int off_x, int off_y,
               const double[::1] dev_lookup,
               const double[:, ::1] boundary_dev,
               const unsigned char[:, ::1] adjacency,
               const unsigned char[::1] last_cell,
               int security_threshold, double switch_prob,
               bint optimize_boundaries, unsigned long long rng_base):
    cdef int height = cells.shape[0]
    cdef int width = cells.shape[1]
    cdef int num = adjacency.shape[0] - 1
    cdef cnp.ndarray out = np.full((height, width), -1, dtype=np.int32)
    cdef int[:, ::1] targets = out

    cdef int x, y, i, k, j, own, u, v, u_idx, v_idx
    cdef int ring[8]
    cdef int vn[4]
    cdef int transitions, security, n_own, n_u
    cdef bint critical, bg_ok, is_bg, valid
    cdef double own_dev, sig, best_sig, dl
    cdef long long best_target
    cdef double p

    with nogil:
        for y in range(off_y, height, 2):
            for x in range(off_x, width, 2):
                own = cells[y, x]
                if own == CROSSING:
                    continue
                if last_cell[own + 2]:
                    continue
                for i in range(8):
                    ring[i] = _label(cells, height, width,
                                     x + RING_DX[i], y + RING_DY[i])
                for k in range(4):
                    vn[k] = ring[VN_RING[k]]
                critical = False
                for k in range(4):
                    if vn[k] == CROSSING:
                        critical = True
                if critical:
                    continue
                if own != BACKGROUND:
                    transitions = 0
                    for i in range(8):
                        if ring[i] != ring[(i + 1) % 8]:
                            transitions += 1
                    if transitions > 3:
                        continue
                security = 0
                n_own = 0
                for k in range(4):
                    if vn[k] == own:
                        n_own += 1
                security = 3 * n_own
                for i in range(1, 8, 2):
                    if ring[i] == own:
                        security += 1
                if security >= security_threshold:
                    continue

                is_bg = own == BACKGROUND
                own_dev = dev_lookup[own + 2]
                best_sig = -INFINITY
                best_target = 2147483647

                for k in range(4):
                    u = vn[k]
                    if u < 0 or u == own:
                        continue
                    u_idx = u

                    # Area criterion.
                    sig = dev_lookup[u + 2] - own_dev
                    if sig > 0.0:
                        valid = True
                        if is_bg:
                            for j in range(4):
                                v = vn[j]
                                if v == BACKGROUND:
                                    continue
                                elif v == EXTERIOR:
                                    if not adjacency[u_idx, num]:
                                        valid = False
                                elif v >= 0:
                                    if v != u and not adjacency[u_idx, v]:
                                        valid = False
                                else:
                                    valid = False
                        if valid and (sig > best_sig or
                                      (sig == best_sig and u < best_target)):
                            best_sig = sig
                            best_target = u

                    # Boundary criterion.
                    if optimize_boundaries and not is_bg and adjacency[own, u_idx]:
                        n_u = 0
                        for j in range(4):
                            if vn[j] == u:
                                n_u += 1
                        dl = boundary_dev[own, u_idx]
                        if dl * (n_own - n_u) > 0.0:
                            sig = fabs(dl)
                            if sig > best_sig or (sig == best_sig and
                                                  u < best_target):
                                best_sig = sig
                                best_target = u

                if best_sig > -INFINITY:
                    if _draw(rng_base, <unsigned long long> (y * width + x)) < switch_prob:
                        targets[y, x] = <int> best_target
    return out
