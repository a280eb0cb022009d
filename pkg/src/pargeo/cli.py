"""Command-line front end: compute, validate, bench and export-ply.

Batch, non-interactive.  Diagnostics go to stderr; stdout carries data
only with ``--out -``.  Exit codes: 0 success (validate: all checks
within tolerance), 1 I/O, parse or validation failure, 2 invalid
arguments, 3 engine guard tripped.
"""
from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time

import numpy as np

from . import io as meshio
from .engine import EngineConfig, EngineGuard, run_ich, run_pch
from .mesh import MeshError
from .oracle import BRUTE_FORCE_MAX_FACES, brute_force_geodesic, run_dijkstra

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_GUARD = 3

STATS_SCHEMA = 1

_SELECTION = {"exact": "exact", "strided": "approximate_strided"}


def _add_common(p: argparse.ArgumentParser, algo=True) -> None:
    p.add_argument("--mesh", required=True, help="mesh file (obj or ply)")
    p.add_argument("--format", choices=("obj", "ply"),
                   help="override format detection")
    p.add_argument("--source", type=int, action="append", default=[],
                   help="source vertex index (repeatable)")
    p.add_argument("--sources", metavar="FILE",
                   help="file of whitespace-separated source indices")
    if algo:
        p.add_argument("--algo", choices=("pch", "ich", "dijkstra", "brute"),
                       default="pch")
    p.add_argument("--k", type=int, default=4096,
                   help="selection size per iteration")
    p.add_argument("--threads", type=int, default=None,
                   help="worker count T")
    p.add_argument("--selection", choices=tuple(_SELECTION),
                   default="exact")
    p.add_argument("--epsilon", type=float, default=None,
                   help="tiny-window tolerance")
    p.add_argument("--seed", type=int, default=0)


def _config(args) -> EngineConfig:
    kwargs = {"k": args.k, "selection_mode": _SELECTION[args.selection],
              "seed": args.seed}
    if args.threads is not None:
        kwargs["workers"] = args.threads
    if args.epsilon is not None:
        kwargs["epsilon_window"] = args.epsilon
    return EngineConfig(**kwargs)


def _sources(args, n_vertices: int) -> list[int]:
    src = list(args.source)
    if args.sources:
        src += meshio.read_sources(args.sources)
    if not src:
        raise UsageError("at least one source is required "
                         "(--source or --sources)")
    for s in src:
        if s < 0 or s >= n_vertices:
            raise UsageError(f"source index {s} out of range")
    return sorted(set(src))


class UsageError(ValueError):
    pass


def _load(args):
    return meshio.load_mesh(args.mesh, args.format)


def _run_algo(algo, mesh, sources, config, max_faces=None):
    if algo == "pch":
        return run_pch(mesh, sources, config)
    if algo == "ich":
        return run_ich(mesh, sources, config)
    if algo == "dijkstra":
        return run_dijkstra(mesh, sources), None
    if algo == "brute":
        best = np.full(mesh.n_vertices, np.inf)
        for s in sources:
            best = np.minimum(best,
                              brute_force_geodesic(mesh, s, max_faces))
        return best, None
    raise UsageError(f"unknown algorithm {algo!r}")


def cmd_compute(args) -> int:
    mesh = _load(args)
    sources = _sources(args, mesh.n_vertices)
    config = _config(args)
    if args.algo in ("ich", "dijkstra", "brute") and (
            args.k != 4096 or args.threads is not None):
        print(f"warning: --k/--threads ignored for --algo {args.algo}",
              file=sys.stderr)
    t0 = time.perf_counter()
    dist, stats = _run_algo(args.algo, mesh, sources, config,
                            max_faces=args.max_faces)
    wall = time.perf_counter() - t0
    if args.out == "-":
        meshio.write_distances(sys.stdout, dist)
    elif args.out:
        meshio.write_distances(args.out, dist)
    if args.stats:
        doc = {"schema": STATS_SCHEMA, "mesh": args.mesh,
               "algorithm": args.algo, "sources": sources,
               "vertices": mesh.n_vertices, "faces": mesh.n_faces}
        if stats is not None:
            doc.update(stats.to_dict())
        with open(args.stats, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
    if args.ply:
        meshio.write_ply(args.ply, mesh.positions, mesh.faces,
                         distances=dist, binary=not args.ascii)
    nwin = stats.total_windows_created if stats is not None else 0
    nit = stats.iterations if stats is not None else 0
    print(f"{args.algo}: {mesh.n_vertices} vertices, {nwin} windows, "
          f"{nit} iterations, {wall:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    mesh = _load(args)
    sources = _sources(args, mesh.n_vertices)
    config = _config(args)
    dist, _ = run_pch(mesh, sources, config)

    if args.compare:
        ref = meshio.read_distances(args.compare)
        if len(ref) != len(dist):
            print(f"compare file has {len(ref)} entries, expected "
                  f"{len(dist)}", file=sys.stderr)
            return EXIT_FAILURE
        return _report_deviation("compare", dist, ref, args.tolerance)

    failures = 0
    ref, _ = run_ich(mesh, sources, config)
    failures += _report_deviation("ich", dist, ref, args.tolerance)
    if mesh.n_faces <= BRUTE_FORCE_MAX_FACES:
        best = np.full(mesh.n_vertices, np.inf)
        for s in sources:
            best = np.minimum(best, brute_force_geodesic(mesh, s))
        failures += _report_deviation("brute", dist, best, args.tolerance)
    upper = run_dijkstra(mesh, sources)
    chord = np.min(np.stack([np.linalg.norm(
        mesh.positions - mesh.positions[s], axis=1) for s in sources]),
        axis=0)
    n_lower = int(np.sum(dist < chord - args.tolerance))
    finite = np.isfinite(upper)
    n_upper = int(np.sum(dist[finite] > upper[finite] + args.tolerance))
    dest = np.roll(mesh.faces, -1, axis=1).reshape(-1)
    gap = np.abs(dist[mesh.origin] - dist[dest])
    with np.errstate(invalid="ignore"):
        n_lip = int(np.sum(gap > mesh.length + args.tolerance))
    print(f"sandwich: {n_lower} below Euclidean chord, {n_upper} above "
          f"edge-graph bound", file=sys.stderr)
    print(f"edge-Lipschitz violations: {n_lip}", file=sys.stderr)
    failures += n_lower + n_upper + n_lip
    print("validate: PASS" if failures == 0 else "validate: FAIL",
          file=sys.stderr)
    return EXIT_OK if failures == 0 else EXIT_FAILURE


def _report_deviation(label, dist, ref, tol) -> int:
    both = np.isfinite(dist) & np.isfinite(ref)
    agree_inf = np.isfinite(dist) == np.isfinite(ref)
    denom = np.maximum(np.abs(ref[both]), 1e-12)
    rel = np.abs(dist[both] - ref[both]) / denom
    worst = float(rel.max()) if rel.size else 0.0
    n_bad = int(np.sum(rel > tol)) + int(np.sum(~agree_inf))
    print(f"{label}: max relative deviation {worst:.3e}, "
          f"{n_bad} vertices beyond {tol:g}", file=sys.stderr)
    if n_bad:
        idx = np.where(both)[0][rel > tol]
        for v in idx[:20]:
            print(f"  vertex {v}: got {dist[v]:.17g} want {ref[v]:.17g}",
                  file=sys.stderr)
        for v in np.where(~agree_inf)[0][:20]:
            print(f"  vertex {v}: got {dist[v]} want {ref[v]}",
                  file=sys.stderr)
    return n_bad


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for path in args.mesh:
        mesh = meshio.load_mesh(path, args.format)
        srcs = rng.integers(0, mesh.n_vertices, size=args.repetitions)
        for k in args.k_sweep:
            for t in args.t_sweep:
                for mode_name in args.selection_sweep:
                    config = EngineConfig(
                        k=k, workers=t, selection_mode=_SELECTION[mode_name])
                    for rep, s in enumerate(srcs):
                        dist, stats = run_pch(mesh, [int(s)], config)
                        row = {
                            "mesh": path, "faces": mesh.n_faces,
                            "vertices": mesh.n_vertices, "k": k,
                            "threads": t, "selection": mode_name,
                            "repetition": rep, "source": int(s),
                            "iterations": stats.iterations,
                            "total_windows": stats.total_windows_created,
                            "pruned_windows": stats.total_windows_pruned,
                            "peak_pool": stats.peak_active_pool,
                            "events_created": stats.events_created,
                            "events_applied": stats.events_applied,
                            "max_children": stats.max_children_per_window,
                        }
                        if not args.no_timings:
                            row.update({
                                "time_total": stats.time_total,
                                "time_select": stats.time_select,
                                "time_propagate": stats.time_propagate,
                                "time_compact": stats.time_compact,
                                "time_events": stats.time_events,
                            })
                        rows.append(row)
    if not rows:
        raise UsageError("bench produced no rows")
    if args.out == "-" or not args.out:
        _write_csv(sys.stdout, rows)
    else:
        with open(args.out, "w", newline="") as fh:
            _write_csv(fh, rows)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"schema": STATS_SCHEMA,
                       "summary": _summarize(rows)}, fh, indent=1,
                      sort_keys=True)
            fh.write("\n")
    _print_phase_report(rows)
    return EXIT_OK


def _write_csv(fh, rows) -> None:
    writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()),
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def _summarize(rows):
    group: dict[tuple, list[dict]] = {}
    for r in rows:
        group.setdefault((r["mesh"], r["k"], r["threads"], r["selection"]),
                         []).append(r)
    out = []
    for (mesh, k, t, sel), rs in group.items():
        entry = {"mesh": mesh, "k": k, "threads": t, "selection": sel,
                 "repetitions": len(rs),
                 "mean_total_windows": statistics.fmean(
                     r["total_windows"] for r in rs),
                 "mean_peak_pool": statistics.fmean(
                     r["peak_pool"] for r in rs)}
        if "time_total" in rs[0]:
            times = [r["time_total"] for r in rs]
            entry["mean_time_total"] = statistics.fmean(times)
            entry["stdev_time_total"] = (statistics.stdev(times)
                                         if len(times) > 1 else 0.0)
            for phase in ("select", "propagate", "compact", "events"):
                entry[f"mean_time_{phase}"] = statistics.fmean(
                    r[f"time_{phase}"] for r in rs)
        out.append(entry)
    return out


def _print_phase_report(rows) -> None:
    if "time_total" not in rows[0]:
        return
    summary = _summarize(rows)
    by_t = {}
    for e in summary:
        by_t.setdefault(e["threads"], []).append(e)
    print("phase breakdown (mean seconds per run):", file=sys.stderr)
    base = None
    for t in sorted(by_t):
        es = by_t[t]
        prop = statistics.fmean(e["mean_time_propagate"] for e in es)
        tot = statistics.fmean(e["mean_time_total"] for e in es)
        sel = statistics.fmean(e["mean_time_select"] for e in es)
        cmp_ = statistics.fmean(e["mean_time_compact"] for e in es)
        evt = statistics.fmean(e["mean_time_events"] for e in es)
        if base is None:
            base = prop
        print(f"  T={t}: total {tot:.3f} select {sel:.3f} propagate "
              f"{prop:.3f} compact {cmp_:.3f} events {evt:.3f} "
              f"(propagation speedup x{base / prop:.2f}, "
              f"{100 * prop / tot:.0f}% of total)", file=sys.stderr)


def cmd_export_ply(args) -> int:
    mesh = _load(args)
    dist = meshio.read_distances(args.distances)
    if len(dist) != mesh.n_vertices:
        print(f"distance file has {len(dist)} entries, expected "
              f"{mesh.n_vertices}", file=sys.stderr)
        return EXIT_FAILURE
    meshio.write_ply(args.out, mesh.positions, mesh.faces, distances=dist,
                     binary=not args.ascii)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pargeo",
        description="exact geodesic distance fields on triangle meshes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute a distance field")
    _add_common(p)
    p.add_argument("--out", help="distance file path, or - for stdout")
    p.add_argument("--stats", help="write run statistics JSON here")
    p.add_argument("--ply", help="write mesh + distances as PLY here")
    p.add_argument("--ascii", action="store_true",
                   help="ASCII PLY instead of binary little-endian")
    p.add_argument("--max-faces", type=int, default=None,
                   help="strip length bound for --algo brute")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("validate",
                       help="cross-check engines, oracles and invariants")
    _add_common(p, algo=False)
    p.add_argument("--compare", metavar="FILE",
                   help="compare against an existing distance file")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="parameter sweeps with seeded sources")
    p.add_argument("--mesh", action="append", required=True)
    p.add_argument("--format", choices=("obj", "ply"))
    p.add_argument("--k-sweep", type=_int_list, default=[4096],
                   help="comma-separated k values")
    p.add_argument("--t-sweep", type=_int_list, default=[1],
                   help="comma-separated worker counts")
    p.add_argument("--selection-sweep", type=_str_list, default=["exact"],
                   help="comma-separated selection modes (exact,strided)")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path, or - for stdout")
    p.add_argument("--json", help="summary JSON path")
    p.add_argument("--no-timings", action="store_true",
                   help="omit wall-time columns for reproducible output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-ply",
                       help="attach a distance file to a mesh as PLY")
    p.add_argument("--mesh", required=True)
    p.add_argument("--format", choices=("obj", "ply"))
    p.add_argument("--distances", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ascii", action="store_true")
    p.set_defaults(func=cmd_export_ply)
    return parser


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _str_list(text: str) -> list[str]:
    out = [tok.strip() for tok in text.split(",") if tok.strip()]
    for tok in out:
        if tok not in _SELECTION:
            raise argparse.ArgumentTypeError(f"unknown selection {tok!r}")
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EngineGuard as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (MeshError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
