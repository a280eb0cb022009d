import math

import numpy as np
import pytest

from pargeo import io, meshes
from pargeo.mesh import (BOUNDARY, MeshError, VertexClass,
                         build_half_edge_mesh, classify_total_angle,
                         next_half_edge, prev_half_edge)


def test_single_triangle_obj(tmp_path):
    path = tmp_path / "tri.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    m = io.load_mesh(path)
    assert m.n_half_edges == 3
    np.testing.assert_allclose(sorted(m.length),
                               [1.0, 1.0, math.sqrt(2.0)])
    assert all(m.opposite == BOUNDARY)


def test_cube_structure(cube):
    assert cube.n_half_edges == 36
    assert np.all(cube.opposite >= 0)
    assert np.all(cube.vertex_class == VertexClass.SPHERICAL)
    # cube corner: three right angles
    np.testing.assert_allclose(cube.total_angle, 1.5 * math.pi)


def test_quad_face_rejected(tmp_path):
    path = tmp_path / "quad.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    with pytest.raises(MeshError, match="non-triangle face"):
        io.load_mesh(path)


def test_obj_slash_indices(tmp_path):
    path = tmp_path / "t.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\n"
                    "f 1/1/1 2/1/1 3/1/1\n")
    m = io.load_mesh(path)
    assert m.n_faces == 1


@pytest.mark.parametrize("j,expected", [(4, 5), (5, 3), (0, 1)])
def test_next_half_edge(j, expected):
    assert next_half_edge(j) == expected


def test_prev_is_inverse_of_next():
    for j in range(30):
        assert prev_half_edge(next_half_edge(j)) == j


def _face_scan_neighbors(faces, v):
    out = set()
    for tri in faces:
        if v in tri:
            for u in tri:
                if u != v:
                    out.add(int(u))
    return out


def test_one_ring_cube_corner(cube):
    for v in range(cube.n_vertices):
        ring = cube.one_ring(v)
        incident = int(np.sum(cube.origin == v))
        assert len(ring) == incident
        assert set(ring) == _face_scan_neighbors(cube.faces, v)


def test_one_ring_fan_center():
    m = build_half_edge_mesh(*meshes.saddle_fan(6))
    ring = m.one_ring(0)
    assert len(ring) == 6
    assert set(ring) == {1, 2, 3, 4, 5, 6}
    # cyclic: consecutive ring vertices share an edge with the center
    for a, b in zip(ring, ring[1:] + ring[:1]):
        assert abs(a - b) in (1, 5)


def test_one_ring_boundary_vertex():
    m = meshes.make("triangle")
    for v in range(3):
        ring = m.one_ring(v)
        assert len(ring) == 2
        assert set(ring) == {0, 1, 2} - {v}


def test_one_ring_matches_face_scan_on_corpus(tiny_corpus):
    for name, m in tiny_corpus.items():
        for v in range(m.n_vertices):
            assert set(m.one_ring(v)) == _face_scan_neighbors(m.faces, v), \
                (name, v)


def test_classification_examples():
    cube = meshes.make("cube")
    assert cube.classify_vertex(0) is VertexClass.SPHERICAL
    grid = build_half_edge_mesh(*meshes.grid(4, 4))
    center = 2 * 5 + 2
    assert grid.classify_vertex(center) is VertexClass.EUCLIDEAN
    assert abs(grid.total_angle[center] - 2 * math.pi) < 1e-12
    fan8 = build_half_edge_mesh(*meshes.saddle_fan(8))
    assert fan8.classify_vertex(0) is VertexClass.SADDLE
    assert abs(fan8.total_angle[0] - 8 * math.pi / 3) < 1e-9


def test_classify_total_angle_band():
    two_pi = 2 * math.pi
    assert classify_total_angle(two_pi - 1e-6) is VertexClass.SPHERICAL
    assert classify_total_angle(two_pi + 1e-6) is VertexClass.SADDLE
    assert classify_total_angle(two_pi + 1e-12) is VertexClass.EUCLIDEAN


def test_opposite_involution_and_lengths(tiny_corpus):
    for name, m in tiny_corpus.items():
        for j in range(m.n_half_edges):
            o = int(m.opposite[j])
            if o == BOUNDARY:
                continue
            assert int(m.opposite[o]) == j, name
            assert m.length[o] == m.length[j], name


def test_triangle_angle_sums(tiny_corpus):
    for name, m in tiny_corpus.items():
        sums = m.corner_angle.reshape(-1, 3).sum(axis=1)
        np.testing.assert_allclose(sums, math.pi, atol=1e-9), name


@pytest.mark.parametrize("fmt", ["obj", "ply_ascii", "ply_binary"])
def test_roundtrip_preserves_lengths(tmp_path, fmt):
    positions, faces = meshes.icosphere(1)
    m = build_half_edge_mesh(positions, faces)
    path = tmp_path / ("m.obj" if fmt == "obj" else "m.ply")
    if fmt == "obj":
        io.write_obj(path, positions, faces)
    else:
        io.write_ply(path, positions, faces, binary=fmt == "ply_binary")
    m2 = io.load_mesh(path)
    np.testing.assert_allclose(m2.length, m.length, rtol=1e-15)
    assert np.array_equal(m2.faces, m.faces)


def test_ply_distance_property_roundtrip(tmp_path):
    positions, faces = meshes.cube()
    dist = np.arange(8, dtype=float) * 0.25
    path = tmp_path / "d.ply"
    io.write_ply(path, positions, faces, distances=dist)
    blob = path.read_bytes()
    assert b"geodesic_distance" in blob
    p2, f2 = io.read_ply(path)
    np.testing.assert_array_equal(p2, positions)


def test_nonmanifold_edge_rejected():
    positions = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1],
                          [0, -1, 0]], dtype=float)
    faces = np.array([[0, 1, 2], [0, 1, 3], [1, 0, 4]])
    with pytest.raises(MeshError, match="non-manifold"):
        build_half_edge_mesh(positions, faces)


def test_zero_length_edge_rejected():
    positions = np.array([[0, 0, 0], [0, 0, 0], [0, 1, 0]], dtype=float)
    faces = np.array([[0, 1, 2]])
    with pytest.raises(MeshError):
        build_half_edge_mesh(positions, faces)


def test_degenerate_triangle_rejected():
    positions = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
    faces = np.array([[0, 1, 2]])
    with pytest.raises(MeshError, match="degenerate"):
        build_half_edge_mesh(positions, faces)


def test_out_of_range_face_rejected():
    positions = np.zeros((3, 3))
    with pytest.raises(MeshError):
        build_half_edge_mesh(positions, np.array([[0, 1, 5]]))


def test_distance_file_roundtrip(tmp_path):
    vals = np.array([0.0, 1.0 / 3.0, math.sqrt(5.0), np.inf, 1e-300])
    path = tmp_path / "d.txt"
    io.write_distances(path, vals)
    back = io.read_distances(path)
    assert np.array_equal(vals, back)


def test_sources_file(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("0 3  # comment\n7\n# whole-line comment\n2 2\n")
    assert io.read_sources(path) == [0, 3, 7, 2, 2]
