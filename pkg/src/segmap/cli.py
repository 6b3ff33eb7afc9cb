"""Command-line driver for the full embedding pipeline.

Subcommands:
  gen       generate a labeled grid and write it to disk
  embed     grid -> graph -> layout -> initial cell grid (no optimization)
  optimize  run the automaton on an initial or resumed cell grid
  render    shade an existing cell grid into an image
  eval      report quality metrics for an existing cell grid
  all       the whole pipeline: grid -> image + state + report
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import metrics, render
from .automaton import AutomatonParams, run as run_automaton
from .layout import choose_external_face, planarize
from .ndgrid import (
    LabeledGrid,
    compute_stats,
    generate_d1,
    generate_d2,
    load_grid,
    relabel_connected_components,
    save_grid,
)
from .raster import select_initial_config
from .seggraph import build_seggraph
from .state import load_castate, save_castate

log = logging.getLogger("segmap")


def _configure_logging() -> None:
    level = os.environ.get("SEGMAP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(name)s %(levelname)s %(message)s")


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="path to a labeled-grid file")
    p.add_argument("--gen", choices=("d1", "d2"),
                   help="generate the input instead of reading it")
    p.add_argument("--dims", type=int, nargs="+", default=[50, 50],
                   help="grid dimensions for --gen d1")
    p.add_argument("--segments", type=int, default=20,
                   help="segment count for --gen d1")
    p.add_argument("--seed", type=int, default=42,
                   help="seed for --gen d1 and the automaton RNG")
    p.add_argument("--no-relabel", action="store_true",
                   help="skip splitting labels into connected components")


def _add_automaton_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iterations", type=int, default=5000)
    p.add_argument("--damping", type=float, default=7.0)
    p.add_argument("--security", type=int, default=11)
    p.add_argument("--removal-interval", type=int, default=300)
    p.add_argument("--no-boundary-opt", action="store_true",
                   help="optimize areas only, ignore boundary lengths")
    p.add_argument("--frames-every", type=int, default=0,
                   help="dump a state snapshot every N iterations (0 = off)")


def _add_render_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pixels-per-cell", type=int, default=8)
    p.add_argument("--palette", help="palette file (one 'label #RRGGBB' per line)")


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap (results are identical for any value)")
    p.add_argument("-o", "--output", default=".",
                   help="output directory")


def _outdir(args) -> Path:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_input(args):
    """Resolve the input grid and its label mapping (or exit with an error)."""
    if bool(args.input) == bool(args.gen):
        raise SystemExit("exactly one of --input and --gen is required")
    if args.gen == "d2":
        grid = generate_d2()
    elif args.gen == "d1":
        grid = generate_d1(tuple(args.dims), args.segments, args.seed)
    else:
        grid = load_grid(args.input)
    mapping = {}
    if not getattr(args, "no_relabel", False):
        relabeled = relabel_connected_components(grid)
        if not (relabeled.labels == grid.labels).all():
            import numpy as np
            pairs = np.unique(
                np.stack([grid.labels.ravel(), relabeled.labels.ravel()]),
                axis=1)
            mapping = {int(new): int(old) for old, new in pairs.T}
            log.info("relabeled %d labels into %d connected components",
                     len(set(mapping.values())), len(mapping))
        grid = relabeled
    return grid, mapping


def _params(args, seed: int) -> AutomatonParams:
    return AutomatonParams(
        max_iterations=args.iterations,
        damping_factor=args.damping,
        security_threshold=args.security,
        removal_interval=args.removal_interval,
        optimize_boundaries=not args.no_boundary_opt,
        rng_seed=seed,
    )


def _embed(grid: LabeledGrid, timings: dict):
    """Grid to initial cell grid, timing each stage."""
    t0 = time.perf_counter()
    stats = compute_stats(grid)
    graph = build_seggraph(stats)
    timings["graph"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    candidates = choose_external_face(planarize(graph))
    timings["planarize"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    state = select_initial_config(candidates, graph)
    timings["layout"] = time.perf_counter() - t0
    return state, stats, graph


def _optimize(state, stats, args, timings: dict):
    out = _outdir(args)
    frame_cb = None
    if args.frames_every > 0:
        def frame_cb(snapshot, it):
            save_castate(snapshot, out / f"frame_{it:06d}.castate")
    t0 = time.perf_counter()
    state, used = run_automaton(state, stats, _params(args, args.seed),
                                frames_every=args.frames_every,
                                frame_callback=frame_cb)
    timings["automaton"] = time.perf_counter() - t0
    return state, used


def _render(state, args, timings: dict, path) -> None:
    profile = render.ShadingProfile(
        r=args.pixels_per_cell,
        palette=(render.load_palette(args.palette) if args.palette else None),
    )
    t0 = time.perf_counter()
    image = render.render_image(state, profile)
    render.save_image(image, path)
    timings["render"] = time.perf_counter() - t0


def _report(state, stats, graph, path, *, iterations_used=0,
            timings=None, label_mapping=None) -> None:
    report = metrics.build_report(state, stats, graph,
                                  iterations_used=iterations_used,
                                  timings=timings,
                                  label_mapping=label_mapping)
    metrics.emit_report(report, path)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    grid, _ = _load_input(args)
    out = _outdir(args)
    path = out / "grid.ndseg"
    save_grid(grid, path)
    print(f"wrote {path} ({'x'.join(map(str, grid.dims))}, "
          f"{len(grid.segment_ids())} segments)")
    return 0


def _cmd_embed(args) -> int:
    grid, mapping = _load_input(args)
    timings: dict[str, float] = {}
    state, stats, graph = _embed(grid, timings)
    out = _outdir(args)
    save_castate(state, out / "initial.castate")
    _report(state, stats, graph, out / "report.json",
            timings=timings, label_mapping=mapping)
    return 0


def _cmd_optimize(args) -> int:
    grid, mapping = _load_input(args)
    stats = compute_stats(grid)
    graph = build_seggraph(stats)
    timings: dict[str, float] = {}
    if args.state:
        state = load_castate(args.state)
        state.origin_graph = graph
    else:
        state, stats, graph = _embed(grid, timings)
    state, used = _optimize(state, stats, args, timings)
    out = _outdir(args)
    save_castate(state, out / "state.castate")
    _report(state, stats, graph, out / "report.json",
            iterations_used=used, timings=timings, label_mapping=mapping)
    return 0


def _cmd_render(args) -> int:
    state = load_castate(args.state)
    out = _outdir(args)
    timings: dict[str, float] = {}
    _render(state, args, timings, out / "embedding.png")
    print(f"wrote {out / 'embedding.png'}")
    return 0


def _cmd_eval(args) -> int:
    grid, mapping = _load_input(args)
    state = load_castate(args.state)
    stats = compute_stats(grid)
    graph = build_seggraph(stats)
    out = _outdir(args)
    _report(state, stats, graph, out / "report.json", label_mapping=mapping)
    return 0


def _cmd_all(args) -> int:
    grid, mapping = _load_input(args)
    timings: dict[str, float] = {}
    state, stats, graph = _embed(grid, timings)
    state, used = _optimize(state, stats, args, timings)
    out = _outdir(args)
    save_castate(state, out / "state.castate")
    _render(state, args, timings, out / "embedding.png")
    _report(state, stats, graph, out / "report.json",
            iterations_used=used, timings=timings, label_mapping=mapping)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segmap",
        description="Topology-exact 2D embeddings of n-D segmentations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an input grid")
    _add_input_args(p)
    _add_common_args(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("embed", help="compute the initial cell grid")
    _add_input_args(p)
    _add_common_args(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("optimize", help="run the automaton")
    _add_input_args(p)
    p.add_argument("--state", help="resume from an existing state dump")
    _add_automaton_args(p)
    _add_common_args(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("render", help="shade a cell grid into an image")
    p.add_argument("--state", required=True, help="cell-grid dump to render")
    _add_render_args(p)
    _add_common_args(p)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("eval", help="report metrics for an existing state")
    _add_input_args(p)
    p.add_argument("--state", required=True, help="cell-grid dump to score")
    _add_common_args(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("all", help="full pipeline: grid to image and report")
    _add_input_args(p)
    _add_automaton_args(p)
    _add_render_args(p)
    _add_common_args(p)
    p.set_defaults(func=_cmd_all)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        raise SystemExit("--threads must be at least 1")
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"segmap: {args.command} failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
