"""Procedural test meshes: analytic solids, planar pieces, subdivided
spheres and larger displaced/gridded surfaces for benchmarks.

Generators return (positions, faces) arrays; ``make(name, ...)`` builds
the half-edge mesh directly.  Everything here is deterministic.
"""
from __future__ import annotations

import math

import numpy as np

from .mesh import SurfaceMesh, build_half_edge_mesh


def single_triangle():
    positions = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    faces = np.array([[0, 1, 2]])
    return positions, faces


def square():
    """Unit square split along its diagonal."""
    positions = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                          [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
    faces = np.array([[0, 1, 2], [0, 2, 3]])
    return positions, faces


def strip(n: int, width: float = 1.0):
    """Planar strip of n unit quads, each split into two triangles."""
    positions = []
    for i in range(n + 1):
        positions.append([i, 0.0, 0.0])
        positions.append([i, width, 0.0])
    faces = []
    for i in range(n):
        a, b = 2 * i, 2 * i + 1
        c, d = 2 * i + 2, 2 * i + 3
        faces.append([a, c, d])
        faces.append([a, d, b])
    return np.asarray(positions, float), np.asarray(faces, np.int64)


def grid(nx: int, ny: int, spacing: float = 1.0, heights=None):
    """Planar (or height-displaced) rectangular grid of triangles."""
    xs = np.arange(nx + 1) * spacing
    ys = np.arange(ny + 1) * spacing
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    gz = np.zeros_like(gx) if heights is None else heights(gx, gy)
    positions = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])
    faces = []
    for i in range(nx):
        for j in range(ny):
            a = i * (ny + 1) + j
            b = (i + 1) * (ny + 1) + j
            faces.append([a, b, b + 1])
            faces.append([a, b + 1, a + 1])
    return positions, np.asarray(faces, np.int64)


def cube():
    positions = np.array([
        [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
        [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
    ], dtype=float)
    faces = np.array([
        [0, 2, 1], [0, 3, 2],  # bottom (z=0), outward normal -z
        [4, 5, 6], [4, 6, 7],  # top
        [0, 1, 5], [0, 5, 4],  # y=0
        [1, 2, 6], [1, 6, 5],  # x=1
        [2, 3, 7], [2, 7, 6],  # y=1
        [3, 0, 4], [3, 4, 7],  # x=0
    ], dtype=np.int64)
    return positions, faces


def tetrahedron():
    positions = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]],
                         dtype=float)
    faces = np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
                     dtype=np.int64)
    return positions, faces


def octahedron():
    positions = np.array([
        [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1],
    ], dtype=float)
    faces = np.array([
        [0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
        [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5],
    ], dtype=np.int64)
    return positions, faces


def pyramid():
    """Square pyramid, closed with a split base."""
    positions = np.array([
        [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0.5, 0.5, 0.8],
    ], dtype=float)
    faces = np.array([
        [0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4],
        [0, 2, 1], [0, 3, 2],
    ], dtype=np.int64)
    return positions, faces


def saddle_fan(n: int = 8):
    """n unit equilateral triangles around a center vertex.

    The ring alternates above and below the center plane so every
    triangle is exactly equilateral; for n > 6 the center's total angle
    is n*pi/3 > 2*pi, making it a saddle.
    """
    if n < 6 or n % 2:
        raise ValueError("need an even n >= 6 for an equilateral fan")
    half = math.pi / n
    rho2 = 0.75 / (math.cos(half) ** 2)
    rho = math.sqrt(rho2)
    h = math.sqrt(max(1.0 - rho2, 0.0))
    positions = [[0.0, 0.0, 0.0]]
    for i in range(n):
        ang = 2.0 * math.pi * i / n
        positions.append([rho * math.cos(ang), rho * math.sin(ang),
                          h if i % 2 == 0 else -h])
    faces = [[0, 1 + i, 1 + (i + 1) % n] for i in range(n)]
    return np.asarray(positions, float), np.asarray(faces, np.int64)


def icosahedron():
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    positions = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    positions /= np.linalg.norm(positions[0])
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    return positions, faces


def icosphere(subdivisions: int):
    """Icosahedron subdivided ``subdivisions`` times and projected to the
    unit sphere: 20 * 4**subdivisions faces."""
    positions, faces = icosahedron()
    verts = [tuple(p) for p in positions]
    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in midpoint:
                p = np.asarray(verts[a]) + np.asarray(verts[b])
                p /= np.linalg.norm(p)
                midpoint[key] = len(verts)
                verts.append(tuple(p))
            return midpoint[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc],
                          [ab, bc, ca]]
        faces = np.asarray(new_faces, np.int64)
    return np.asarray(verts, float), faces


def bumpy_sphere(subdivisions: int, amplitude: float = 0.12):
    """Icosphere with deterministic multi-frequency radial displacement;
    an organic closed surface with plenty of saddle vertices."""
    positions, faces = icosphere(subdivisions)
    x, y, z = positions[:, 0], positions[:, 1], positions[:, 2]
    r = 1.0 + amplitude * (np.sin(5.0 * x + 1.0) * np.sin(4.0 * y + 2.0)
                           + 0.6 * np.sin(7.0 * z + 3.0) * np.sin(3.0 * x)
                           + 0.4 * np.sin(6.0 * y * z + 0.5))
    return positions * r[:, None], faces


def torus(nu: int, nv: int, major: float = 2.0, minor: float = 0.8):
    """Closed triangulated torus with 2 * nu * nv faces."""
    positions = []
    for i in range(nu):
        a = 2.0 * math.pi * i / nu
        for j in range(nv):
            b = 2.0 * math.pi * j / nv
            positions.append([
                (major + minor * math.cos(b)) * math.cos(a),
                (major + minor * math.cos(b)) * math.sin(a),
                minor * math.sin(b),
            ])
    faces = []
    for i in range(nu):
        for j in range(nv):
            a = i * nv + j
            b = ((i + 1) % nu) * nv + j
            a2 = i * nv + (j + 1) % nv
            b2 = ((i + 1) % nu) * nv + (j + 1) % nv
            faces.append([a, b, b2])
            faces.append([a, b2, a2])
    return np.asarray(positions, float), np.asarray(faces, np.int64)


def disk_patch(rings: int, amplitude: float = 1.0, flat_fraction: float = 0.05,
               jitter: float = 0.25):
    """Bumpy circular patch: concentric rings stitched into triangles.

    The outer annulus is exactly planar, so the rim is a strictly convex
    polygon and every boundary vertex has interior angle below pi;
    geodesics therefore never bend around the boundary.  Interior rings
    get deterministic angular jitter and multi-frequency heights.  Face
    count is about 6 * rings**2.
    """
    positions = [[0.0, 0.0, 0.0]]
    ring_start = [0]
    counts = [1]
    for k in range(1, rings + 1):
        n = 6 * k
        ring_start.append(len(positions))
        counts.append(n)
        flat = k >= rings * (1.0 - flat_fraction)
        for i in range(n):
            ang = 2.0 * math.pi * i / n
            if not flat and 0 < k < rings:
                ang += jitter * math.sin(12.9898 * k + 78.233 * i) / k
            r = float(k)
            x, y = r * math.cos(ang), r * math.sin(ang)
            if flat:
                z = 0.0
            else:
                z = amplitude * rings / 16.0 * (
                    math.sin(0.61 * x) * math.cos(0.47 * y)
                    + 0.5 * math.sin(1.13 * x + 0.8) * math.sin(0.91 * y))
                z *= min(1.0, 2.0 * k / rings)
                ramp = ((1.0 - flat_fraction) * rings - k) / (0.1 * rings)
                z *= min(1.0, max(0.0, ramp))
            positions.append([x, y, z])
    faces = []
    for i in range(6):
        faces.append([0, 1 + i, 1 + (i + 1) % 6])
    for k in range(1, rings):
        si, ni = ring_start[k], counts[k]
        so, no = ring_start[k + 1], counts[k + 1]
        i = j = 0
        # merge-stitch the two rings by angular order
        while i < ni or j < no:
            ai = (i + 1) / ni if i < ni else 2.0
            aj = (j + 1) / no if j < no else 2.0
            vin = si + i % ni
            vout = so + j % no
            if aj <= ai:
                faces.append([vin, vout, so + (j + 1) % no])
                j += 1
            else:
                faces.append([vin, vout, si + (i + 1) % ni])
                i += 1
    return np.asarray(positions, float), np.asarray(faces, np.int64)


def bumpy_torus(nu: int, nv: int, amplitude: float = 0.25):
    """Torus with deterministic radial displacement: a large generic
    closed surface with mixed curvature."""
    positions, faces = torus(nu, nv)
    x, y, z = positions[:, 0], positions[:, 1], positions[:, 2]
    s = 1.0 + amplitude * (np.sin(3.1 * x + 0.7) * np.cos(2.3 * y)
                           + 0.5 * np.sin(4.7 * z + 1.9) * np.sin(1.7 * x))
    center = np.zeros_like(positions)
    ang = np.arctan2(y, x)
    center[:, 0] = 2.0 * np.cos(ang)
    center[:, 1] = 2.0 * np.sin(ang)
    return center + (positions - center) * s[:, None], faces


def normalize_edge_scale(positions, faces, target: float = 1.0):
    """Rescale positions so the mean edge length is ``target``.

    The window tolerance is an absolute length, so meshes should live at
    a scale where edges are order one, as scanned assets usually do.
    """
    positions = np.asarray(positions, float)
    faces = np.asarray(faces, np.int64)
    a = positions[faces[:, [0, 1, 2]].ravel()]
    b = positions[faces[:, [1, 2, 0]].ravel()]
    mean_edge = float(np.mean(np.linalg.norm(a - b, axis=1)))
    return positions * (target / mean_edge), faces


_GENERATORS = {
    "triangle": single_triangle,
    "square": square,
    "cube": cube,
    "tetrahedron": tetrahedron,
    "octahedron": octahedron,
    "pyramid": pyramid,
    "icosahedron": icosahedron,
}


def make(name: str, *args, **kwargs) -> SurfaceMesh:
    """Build a corpus mesh by name (fixed-size solids only)."""
    positions, faces = _GENERATORS[name](*args, **kwargs)
    return build_half_edge_mesh(positions, faces)


def tiny_corpus() -> dict[str, SurfaceMesh]:
    """The small-mesh corpus (each at most 50 faces) used against the
    brute-force oracle."""
    out = {}
    for name in ("triangle", "square", "cube", "tetrahedron", "octahedron",
                 "pyramid", "icosahedron"):
        out[name] = make(name)
    out["strip6"] = build_half_edge_mesh(*strip(6))
    out["grid4x4"] = build_half_edge_mesh(*grid(4, 4))
    out["saddle8"] = build_half_edge_mesh(*saddle_fan(8))
    out["saddle10"] = build_half_edge_mesh(*saddle_fan(10))
    out["torus4x6"] = build_half_edge_mesh(*torus(4, 6))
    return out
