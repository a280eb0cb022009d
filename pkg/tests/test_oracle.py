import math

import numpy as np
import pytest

from pargeo import meshes
from pargeo.engine import EngineGuard, run_ich
from pargeo.mesh import build_half_edge_mesh
from pargeo.oracle import brute_force_geodesic, run_dijkstra


def test_dijkstra_single_triangle():
    m = meshes.make("triangle")
    np.testing.assert_allclose(run_dijkstra(m, [0]), [0.0, 1.0, 1.0])


def test_dijkstra_cube_upper_bound(cube):
    d = run_dijkstra(cube, [0])
    # edge paths to the opposite corner: 3 or 1 + sqrt(2) depending on
    # diagonal orientation; always at least the geodesic sqrt(5)
    assert d[6] >= math.sqrt(5.0) - 1e-12
    assert d[6] == pytest.approx(1.0 + math.sqrt(2.0))


def test_dijkstra_dominates_euclidean_on_grid():
    m = build_half_edge_mesh(*meshes.grid(5, 5))
    d = run_dijkstra(m, [0])
    chord = np.linalg.norm(m.positions - m.positions[0], axis=1)
    assert np.all(d >= chord - 1e-12)


def test_dijkstra_multi_source_min():
    m = build_half_edge_mesh(*meshes.grid(4, 4))
    d = run_dijkstra(m, [0, 24])
    singles = np.minimum(run_dijkstra(m, [0]), run_dijkstra(m, [24]))
    np.testing.assert_allclose(d, singles)


def test_brute_single_triangle():
    m = meshes.make("triangle")
    np.testing.assert_allclose(brute_force_geodesic(m, 0), [0.0, 1.0, 1.0])


def test_brute_planar_square_is_euclidean():
    m = build_half_edge_mesh(*meshes.square())
    d = brute_force_geodesic(m, 0)
    chord = np.linalg.norm(m.positions - m.positions[0], axis=1)
    np.testing.assert_allclose(d, chord, atol=1e-12)
    assert d[2] == pytest.approx(math.sqrt(2.0))


def test_brute_cube_classic_value(cube):
    d = brute_force_geodesic(cube, 0)
    assert d[6] == pytest.approx(math.sqrt(5.0), rel=1e-12)


def test_brute_matches_ich_on_cube(cube, rel_dev):
    bf = brute_force_geodesic(cube, 0)
    di, _ = run_ich(cube, [0])
    assert rel_dev(di, bf) < 1e-9


def test_brute_saddle_relay():
    # distances across the 8-triangle saddle fan need a relay through the
    # saddle center
    m = build_half_edge_mesh(*meshes.saddle_fan(8))
    d = brute_force_geodesic(m, 1)
    di, _ = run_ich(m, [1])
    np.testing.assert_allclose(d, di, rtol=1e-9)
    # opposite ring vertex is farther than the two-spoke relay upper bound
    assert d[5] <= 2.0 + 1e-12


def test_brute_guard():
    m = build_half_edge_mesh(*meshes.icosphere(2))
    with pytest.raises(EngineGuard, match="too large"):
        brute_force_geodesic(m, 0)


def test_brute_invalid_source(cube):
    with pytest.raises(ValueError):
        brute_force_geodesic(cube, 99)
