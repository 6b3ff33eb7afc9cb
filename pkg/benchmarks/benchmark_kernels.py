"""Compare the compiled and pure-numpy automaton kernels.

Runs the per-phase proposal pass of both kernel implementations on the
same mid-optimization cell grids, checks that the outputs are
bit-identical, and prints the speed ratio.

Usage: python benchmarks/benchmark_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from segmap.automaton import AutomatonParams, DeviationTables
from segmap.automaton import engine, kernel_py, kernels, rng
from segmap.layout import choose_external_face, planarize
from segmap.ndgrid import compute_stats, generate_d1, generate_d2
from segmap.raster import select_initial_config
from segmap.seggraph import build_seggraph


def _prepare(name: str):
    """An initial cell grid advanced 50 iterations, plus its tables."""
    if name == "d2":
        grid = generate_d2()
    else:
        dims, nseg = {"2d-20": ((50, 50), 20),
                      "3d-10": ((20, 20, 20), 10)}[name]
        grid = generate_d1(dims, nseg, seed=42)
    stats = compute_stats(grid)
    graph = build_seggraph(stats)
    state = select_initial_config(choose_external_face(planarize(graph)),
                                  graph)
    params = AutomatonParams()
    tables = DeviationTables.from_state(state, stats)
    for it in range(50):
        engine.step(state, stats, params, tables, it)
    return state, tables, params


def _bench(kernel, state, tables, params, repeats: int) -> float:
    dev = tables.area_dev_lookup()
    bdev = tables.boundary_dev()
    last = tables.last_cell_lookup()
    switch_prob = 0.5
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for it in range(20):
            base = rng.phase_base(params.rng_seed, it)
            off_x, off_y = engine.PHASES[it % 4]
            kernel.mark_phase(state.cells, off_x, off_y, dev, bdev,
                              tables.adjacency, last,
                              params.security_threshold, switch_prob,
                              params.optimize_boundaries, base)
        best = min(best, time.perf_counter() - t0)
    return best


def _verify(state, tables, params) -> None:
    dev = tables.area_dev_lookup()
    bdev = tables.boundary_dev()
    last = tables.last_cell_lookup()
    for it in range(8):
        base = rng.phase_base(params.rng_seed, it)
        off_x, off_y = engine.PHASES[it % 4]
        args = (state.cells, off_x, off_y, dev, bdev, tables.adjacency,
                last, params.security_threshold, 0.5,
                params.optimize_boundaries, base)
        a = kernels.mark_phase(*args)
        b = kernel_py.mark_phase(*args)
        if not np.array_equal(a, b):
            raise AssertionError(f"kernel outputs differ at iteration {it}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats; best of N is reported")
    args = ap.parse_args()

    if kernels.KERNEL_NAME == "numpy":
        print("compiled kernel unavailable; benchmarking numpy against itself")

    print(f"{'dataset':8} {'grid':>10} {kernels.KERNEL_NAME:>12} "
          f"{'numpy':>12} {'speedup':>8}")
    for name in ("d2", "2d-20", "3d-10"):
        state, tables, params = _prepare(name)
        _verify(state, tables, params)
        t_fast = _bench(kernels, state, tables, params, args.repeats)
        t_py = _bench(kernel_py, state, tables, params, args.repeats)
        w, h = state.resolution
        print(f"{name:8} {f'{w}x{h}':>10} {t_fast * 1e3:>10.2f}ms "
              f"{t_py * 1e3:>10.2f}ms {t_py / t_fast:>7.1f}x")
    print("outputs bit-identical across kernels")


if __name__ == "__main__":
    main()
