"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured numbers (run with -s to see them).

The large meshes here stand in for scanned assets: deterministic bumpy
spheres, a bumpy torus and a disk patch at 50K-150K faces, with mean
edge length normalized to one so the fixed interval tolerance behaves
as it does on real scans.
"""
import math
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from pargeo import io, meshes
from pargeo.cli import main
from pargeo.engine import EngineConfig, run_ich, run_pch
from pargeo.mesh import build_half_edge_mesh
from pargeo.oracle import brute_force_geodesic, run_dijkstra

TOL = 1e-9

K_GRID = (256, 4096, 16384)
T_GRID = (1, 4, 8)
MODES = ("exact", "approximate_strided")


def _sources_for(mesh, count, seed):
    rng = np.random.default_rng(seed)
    return sorted(int(s) for s in
                  rng.choice(mesh.n_vertices, size=count, replace=False))


def test_criterion_1_tiny_oracle_equivalence(tiny_corpus, rel_dev):
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    for name, mesh in tiny_corpus.items():
        for src in (0, mesh.n_vertices // 2):
            ref = brute_force_geodesic(mesh, src)
            got, _ = run_pch(mesh, [src])
            dev = rel_dev(got, ref)
            assert dev < TOL, (name, src, dev)
            worst = max(worst, dev)
            checked += 1
    elapsed = time.perf_counter() - t0
    assert len(tiny_corpus) >= 10
    assert elapsed < 10.0
    print(f"PASS criterion 1: {len(tiny_corpus)} meshes / {checked} runs "
          f"vs brute force, worst rel dev {worst:.2e}, {elapsed:.1f}s")


@pytest.mark.parametrize("group", ["icospheres", "scanned"])
def test_criterion_2_cross_engine_equality(group, icospheres,
                                           scanned_meshes, rel_dev):
    suite = (icospheres if group == "icospheres"
             else scanned_meshes)
    worst = 0.0
    for name, mesh in suite.items():
        src = _sources_for(mesh, 1, seed=11)[0]
        ref, _ = run_ich(mesh, [src])
        for k in K_GRID:
            for t in T_GRID:
                for mode in MODES:
                    cfg = EngineConfig(k=k, workers=t, selection_mode=mode)
                    got, _ = run_pch(mesh, [src], cfg)
                    dev = rel_dev(got, ref)
                    assert dev < TOL, (name, k, t, mode, dev)
                    worst = max(worst, dev)
    print(f"PASS criterion 2 ({group}): {len(suite)} meshes x "
          f"{len(K_GRID) * len(T_GRID) * len(MODES)} configs, "
          f"worst rel dev {worst:.2e}")


def test_criterion_3_cube_diagonal(cube):
    got, _ = run_pch(cube, [0])
    ref = brute_force_geodesic(cube, 0)
    assert got[6] == pytest.approx(math.sqrt(5.0), rel=TOL)
    assert ref[6] == pytest.approx(math.sqrt(5.0), rel=TOL)
    print(f"PASS criterion 3: cube corner-to-opposite = {got[6]:.12f} "
          f"(sqrt 5 = {math.sqrt(5.0):.12f})")


def test_criterion_4_sandwich_and_lipschitz(tiny_corpus, icospheres,
                                            scanned_meshes):
    corpus = dict(tiny_corpus)
    corpus.update({f"icosphere{n}": m for n, m in icospheres.items()})
    corpus.update(scanned_meshes)
    for name, mesh in corpus.items():
        src = 0
        dist, _ = run_pch(mesh, [src])
        chord = np.linalg.norm(mesh.positions - mesh.positions[src], axis=1)
        upper = run_dijkstra(mesh, [src])
        assert np.all(dist >= chord - TOL), name
        finite = np.isfinite(upper)
        assert np.all(dist[finite] <= upper[finite] + TOL), name
        dest = np.roll(mesh.faces, -1, axis=1).reshape(-1)
        gap = np.abs(dist[mesh.origin] - dist[dest])
        assert np.all(gap <= mesh.length + TOL), name
    print(f"PASS criterion 4: sandwich + edge-Lipschitz on "
          f"{len(corpus)} corpus meshes")


def test_criterion_5_and_6_window_count_vs_k(icospheres):
    mesh = icospheres[20480]
    src = _sources_for(mesh, 1, seed=5)[0]
    _, ich_stats = run_ich(mesh, [src])
    ks = [2 ** e for e in range(8, 17)]
    windows = []
    times = []
    for k in ks:
        t0 = time.perf_counter()
        _, stats = run_pch(mesh, [src], EngineConfig(k=k, workers=2))
        times.append(time.perf_counter() - t0)
        windows.append(stats.total_windows_created)
    rho = float(spearmanr(ks, windows).statistic)
    best = int(np.argmin(times))
    ratio = windows[best] / ich_stats.total_windows_created
    assert rho >= 0.9
    assert ratio <= 1.5
    print(f"PASS criterion 5: window overhead at fastest k={ks[best]} is "
          f"x{ratio:.3f} (<= 1.5) of sequential "
          f"({ich_stats.total_windows_created} windows)")
    print(f"PASS criterion 6: Spearman(k, total windows) = {rho:.3f} "
          f"over k in 2^8..2^16")


@pytest.mark.parametrize("m", [2, 4, 16])
def test_criterion_7_multi_source(m, icospheres, rel_dev):
    mesh = icospheres[5120]
    sources = _sources_for(mesh, m, seed=100 + m)
    combined, _ = run_pch(mesh, sources)
    singles = np.min([run_pch(mesh, [s])[0] for s in sources], axis=0)
    dev = rel_dev(combined, singles)
    assert dev < TOL
    print(f"PASS criterion 7: {m} sources, combined field equals "
          f"pointwise min (rel dev {dev:.2e})")


def test_criterion_8_determinism(icospheres, tmp_path):
    mesh = icospheres[5120]
    src = _sources_for(mesh, 1, seed=8)[0]
    for t in (1, 8):
        cfg = EngineConfig(k=2048, workers=t, seed=123)
        outputs = []
        counts = []
        for rep in range(3):
            dist, stats = run_pch(mesh, [src], cfg)
            path = tmp_path / f"t{t}r{rep}.txt"
            io.write_distances(path, dist)
            outputs.append(path.read_bytes())
            counts.append(stats.total_windows_created)
        assert outputs[0] == outputs[1] == outputs[2], f"T={t}"
        assert counts[0] == counts[1] == counts[2], f"T={t}"
    print("PASS criterion 8: 3 repeated runs bit-identical for T in {1, 8}")


def test_criterion_9_phase_breakdown_report(tmp_path, capsys):
    positions, faces = meshes.normalize_edge_scale(
        *meshes.bumpy_torus(250, 200))
    mesh_path = tmp_path / "torus100k.ply"
    io.write_ply(mesh_path, positions, faces)
    csv_path = tmp_path / "bench.csv"
    rc = main(["bench", "--mesh", str(mesh_path), "--k-sweep", "4096",
               "--t-sweep", "1,2,4,8", "--repetitions", "1", "--seed", "3",
               "--out", str(csv_path)])
    assert rc == 0
    report = capsys.readouterr().err
    rows = csv_path.read_text().splitlines()
    header = rows[0].split(",")
    assert {"time_propagate", "time_select", "time_compact",
            "time_events"} <= set(header)
    assert len(rows) == 5  # header + one row per T
    assert "speedup" in report
    print("criterion 9 (reported, not gated): 100000-face mesh, "
          "T sweep {1,2,4,8}")
    for line in report.splitlines():
        if line.strip().startswith("T="):
            print(" ", line.strip())
    print("PASS criterion 9: phase breakdown and speedup curve reported")
