"""Acceptance gate: one test per criterion, one PASS/FAIL line each.

Heavy pipeline runs are cached per (dataset, parameters, seed) so criteria
can share them.  Dataset seeds are fixed; automaton seeds vary where a
criterion asks for a median over seeds.
"""

import itertools
import json
import statistics
import time
from functools import lru_cache
from types import SimpleNamespace

import numpy as np
import pytest

from segmap import BACKGROUND, BORDER, CROSSING, compute_stats, generate_d1, generate_d2
from segmap.automaton import AutomatonParams, run
from segmap.cli import main as cli_main
from segmap.layout import choose_external_face, planarize
from segmap.metrics import (
    boundary_lengths_2d,
    extract_adjacency,
    mean_deviations,
    validate_topology,
)
from segmap.raster import select_initial_config
from segmap.render import ShadingProfile, normal_at, run_height
from segmap.seggraph import build_seggraph
from segmap.state import CellState


AUT_SEEDS = (0, 1, 2, 3, 4)


def _verdict(capsys, criterion: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"ACCEPTANCE CRITERION {criterion}: "
              f"{'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


# ---------------------------------------------------------------------------
# Cached pipeline runs
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _dataset(kind, dims, nseg, ds_seed):
    grid = generate_d2() if kind == "d2" else generate_d1(dims, nseg, ds_seed)
    stats = compute_stats(grid)
    return grid, stats, build_seggraph(stats)


@lru_cache(maxsize=None)
def _initial(kind, dims, nseg, ds_seed):
    _, stats, graph = _dataset(kind, dims, nseg, ds_seed)
    state = select_initial_config(choose_external_face(planarize(graph)),
                                  graph)
    return state


@lru_cache(maxsize=None)
def _optimized(kind, dims=None, nseg=None, ds_seed=42, aut_seed=0,
               iterations=5000, security=11, damping=7.0,
               optimize_boundaries=True):
    _, stats, graph = _dataset(kind, dims, nseg, ds_seed)
    state0 = _initial(kind, dims, nseg, ds_seed)
    params = AutomatonParams(max_iterations=iterations,
                             damping_factor=damping,
                             security_threshold=security,
                             optimize_boundaries=optimize_boundaries,
                             rng_seed=aut_seed)
    t0 = time.perf_counter()
    final, used = run(state0.copy(), stats, params)
    elapsed = time.perf_counter() - t0
    d_a, d_l = mean_deviations(final, stats)
    return SimpleNamespace(
        initial=state0, final=final, stats=stats, graph=graph,
        d_a=d_a, d_l=d_l, crossings=final.num_crossings(),
        total_boundary=sum(boundary_lengths_2d(final).values()),
        iterations_used=used, elapsed=elapsed)


# Criterion-1 matrix: D2 plus 30 D1 instances across the 7 configurations.
D1_MATRIX = (
    [((50, 50), n, s) for n in (5, 10, 15, 20) for s in (42, 43, 44, 45, 46)]
    + [((20, 20, 20), 5, s) for s in (42, 43, 44, 45)]
    + [((20, 20, 20), 10, s) for s in (42, 43, 44)]
    + [((20, 20, 20), 15, s) for s in (42, 43, 44)]
)
assert len(D1_MATRIX) == 30


def test_criterion_1_topology_exactness(capsys):
    t0 = time.perf_counter()
    failures = []
    jobs = [("d2", None, None, 42)] + [
        ("d1", dims, nseg, s) for dims, nseg, s in D1_MATRIX]
    for kind, dims, nseg, ds_seed in jobs:
        res = _optimized(kind, dims, nseg, ds_seed)
        for tag, state in (("initial", res.initial), ("final", res.final)):
            ok, diff = validate_topology(state, res.graph)
            if not ok:
                failures.append((kind, dims, nseg, ds_seed, tag, diff))
    minutes = (time.perf_counter() - t0) / 60
    ok = not failures and minutes < 30
    _verdict(capsys, 1, ok,
             f"31 instances, {len(failures)} topology failures, "
             f"{minutes:.1f} min" + (f"; first: {failures[0]}" if failures
                                     else ""))


def test_criterion_2_d1_2d_20_quality(capsys):
    runs = [_optimized("d1", (50, 50), 20, 42, aut_seed=s)
            for s in AUT_SEEDS]
    d_a = statistics.median(r.d_a for r in runs)
    d_l = statistics.median(r.d_l for r in runs)
    crossings = statistics.median(r.crossings for r in runs)
    ok = d_a <= 0.001 and d_l <= 0.03 and crossings == 0
    _verdict(capsys, 2, ok,
             f"median d_A={100 * d_a:.4f}% (<=0.1), "
             f"d_L={100 * d_l:.4f}% (<=3), crossings={crossings} (=0)")


def test_criterion_3_d2_quality(capsys):
    runs = [_optimized("d2", aut_seed=s) for s in AUT_SEEDS]
    d_a = statistics.median(r.d_a for r in runs)
    d_l = statistics.median(r.d_l for r in runs)
    crossings = statistics.median(r.crossings for r in runs)
    slowest = max(r.elapsed for r in runs)
    ok = (crossings <= 8 and d_a <= 0.01 and d_l <= 0.10
          and slowest < 300)
    _verdict(capsys, 3, ok,
             f"median crossings={crossings} (<=8), "
             f"d_A={100 * d_a:.4f}% (<=1), d_L={100 * d_l:.4f}% (<=10), "
             f"slowest run {slowest:.1f}s (<300)")


def test_criterion_4_security_ablation(capsys):
    total = {}
    for security in (10, 12):
        runs = [_optimized("d1", (20, 20, 20), 10, 42, aut_seed=s,
                           security=security) for s in AUT_SEEDS]
        total[security] = statistics.median(r.total_boundary for r in runs)
    ok = total[12] >= total[10]
    _verdict(capsys, 4, ok,
             f"median total boundary: security 12 -> {total[12]}, "
             f"security 10 -> {total[10]}")


def test_criterion_5_boundary_opt_ablation(capsys):
    details = []
    ok = True
    for nseg in (5, 10, 15):
        opt = [_optimized("d1", (20, 20, 20), nseg, 42, aut_seed=s)
               for s in AUT_SEEDS]
        abl = [_optimized("d1", (20, 20, 20), nseg, 42, aut_seed=s,
                          damping=100.0, optimize_boundaries=False)
               for s in AUT_SEEDS]
        d_l_opt = statistics.median(r.d_l for r in opt)
        d_l_abl = statistics.median(r.d_l for r in abl)
        d_a_opt = statistics.median(r.d_a for r in opt)
        d_a_abl = statistics.median(r.d_a for r in abl)
        ok = ok and d_l_abl >= d_l_opt and d_a_abl <= d_a_opt
        details.append(f"{nseg}seg d_L {100 * d_l_abl:.2f}>="
                       f"{100 * d_l_opt:.2f} d_A {100 * d_a_abl:.3f}<="
                       f"{100 * d_a_opt:.3f}")
    _verdict(capsys, 5, ok, "; ".join(details))


def _best_of_3_automaton_time(iterations: int) -> float:
    _, stats, _graph = _dataset("d1", (20, 20, 20), 8, 42)
    state0 = _initial("d1", (20, 20, 20), 8, 42)
    params = AutomatonParams(max_iterations=iterations)
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        run(state0.copy(), stats, params)
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_6_convergence(capsys):
    runs = {n: _optimized("d1", (20, 20, 20), 8, 42, iterations=n)
            for n in (200, 2000)}
    improves = runs[2000].d_a <= runs[200].d_a
    # wall time grows at most linearly in the iteration count (+20%);
    # the runs are sub-second, so the timing comparison uses best-of-3
    budget_ratio = 2000 / 500
    time_ratio = (_best_of_3_automaton_time(2000)
                  / _best_of_3_automaton_time(500))
    linear = time_ratio <= budget_ratio * 1.2
    ok = improves and linear
    _verdict(capsys, 6, ok,
             f"d_A 2000 it {100 * runs[2000].d_a:.3f}% <= "
             f"200 it {100 * runs[200].d_a:.3f}%; "
             f"time x{time_ratio:.2f} for x{budget_ratio:.0f} iterations")


# ---------------------------------------------------------------------------
# Criterion 7: brute-force oracles
# ---------------------------------------------------------------------------

def _oracle_adjacency_edges(cells: np.ndarray) -> set:
    height, width = cells.shape
    edges = set()
    for y in range(height):
        for x in range(width):
            v = int(cells[y, x])
            if v < 0:
                continue
            if x in (0, width - 1) or y in (0, height - 1):
                edges.add((BORDER, v))
            for dx, dy in ((1, 0), (0, 1)):
                if x + dx < width and y + dy < height:
                    u = int(cells[y + dy, x + dx])
                    if u >= 0 and u != v:
                        edges.add((min(u, v), max(u, v)))
    return edges


def _oracle_stats(labels: np.ndarray):
    sizes, pairs = {}, {}
    for idx in itertools.product(*(range(d) for d in labels.shape)):
        v = int(labels[idx])
        sizes[v] = sizes.get(v, 0) + 1
        for axis in range(labels.ndim):
            for step in (-1, 1):
                nb = list(idx)
                nb[axis] += step
                if 0 <= nb[axis] < labels.shape[axis]:
                    u = int(labels[tuple(nb)])
                    if u != v and step == 1:
                        key = (min(u, v), max(u, v))
                        pairs[key] = pairs.get(key, 0) + 1
                else:
                    key = (BORDER, v)
                    pairs[key] = pairs.get(key, 0) + 1
    return sizes, pairs


def test_criterion_7_oracle_equivalence(capsys):
    rng = np.random.default_rng(7)
    adjacency_ok = 0
    for _ in range(100):
        cells = rng.integers(-2, 6, size=(32, 32)).astype(np.int32)
        state = CellState(cells)
        got = {tuple(sorted(e)) for e in extract_adjacency(state).edges}
        if got == _oracle_adjacency_edges(cells):
            adjacency_ok += 1
    stats_ok = 0
    from segmap import LabeledGrid
    for _ in range(20):
        dims = tuple(rng.integers(2, 17, size=3))
        labels = rng.integers(0, 5, size=dims).astype(np.int64)
        stats = compute_stats(LabeledGrid(labels))
        sizes, pairs = _oracle_stats(labels)
        if (stats.sizes == sizes and stats.boundaries == pairs
                and stats.total_size == labels.size
                and stats.total_boundary == sum(pairs.values())):
            stats_ok += 1
    ok = adjacency_ok == 100 and stats_ok == 20
    _verdict(capsys, 7, ok,
             f"adjacency {adjacency_ok}/100, stats {stats_ok}/20")


def test_criterion_8_determinism(capsys, tmp_path):
    outcomes = []
    for name, threads in (("a", "1"), ("b", "8"), ("c", "1")):
        out = tmp_path / name
        code = cli_main(["all", "--gen", "d1", "--dims", "30", "30",
                         "--segments", "8", "--seed", "42",
                         "--iterations", "400", "--threads", threads,
                         "-o", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        report.pop("timings")   # wall times are the one nondeterministic field
        outcomes.append((
            (out / "state.castate").read_bytes(),
            json.dumps(report, sort_keys=True),
            (out / "embedding.png").read_bytes(),
        ))
    ok = outcomes[0] == outcomes[1] == outcomes[2]
    _verdict(capsys, 8, ok,
             "state dumps, reports, and images byte-identical across "
             "reruns and --threads 1 vs 8")


def test_criterion_9_shading_numeric(capsys):
    profile = ShadingProfile(h=1.0, r=8)
    x1, x2, w, h = 0.0, 40.0, profile.w, profile.h
    checks = {
        "plateau normal": normal_at((20.0, 20.0), (x1, x2), (x1, x2),
                                    profile, False) == (0.0, 0.0, 1.0),
        "z(x1)=0": abs(run_height(x1, x2, x1, profile, False)) <= 1e-9,
        "z(x1+w)=h": abs(run_height(x1, x2, x1 + w, profile, False) - h)
                     <= 1e-9,
        "z'(x1+w)=0": abs(2 * ((-h / w ** 2) * (x1 + w) + (h / w ** 2)
                               * (x1 + w))) <= 1e-9,
        "valley=-h": abs(run_height(x1, x2, 20.0, profile, True) + h)
                     <= 1e-9,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    _verdict(capsys, 9, ok,
             "plateau (0,0,1) exact; ramp constraints within 1e-9"
             + (f"; failed: {failed}" if failed else ""))
