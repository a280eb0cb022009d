"""Minimal half-edge surface mesh.

The mesh stores, per half-edge, only the origin vertex, the opposite
half-edge and the edge length; per vertex, one outgoing half-edge.  The
three half-edges of triangle ``t`` live at indices ``3t, 3t+1, 3t+2`` and
the next half-edge around a face is implicit from the index.  Everything
downstream of construction works from edge lengths alone; vertex positions
are kept only for ingestion, Euclidean bound checks and export.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

BOUNDARY = -1

EPS_ANGLE = 1e-9  # euclidean classification band, radians
EPS_DEGENERATE = 1e-12  # relative triangle-inequality slack


class MeshError(ValueError):
    """Raised for malformed or unsupported mesh input."""


class VertexClass(IntEnum):
    SPHERICAL = 0
    EUCLIDEAN = 1
    SADDLE = 2


def next_half_edge(j: int) -> int:
    """Next half-edge around the face of ``j``: ``3*(j//3) + (j+1) % 3``."""
    return 3 * (j // 3) + (j + 1) % 3


def prev_half_edge(j: int) -> int:
    """Previous half-edge around the face of ``j``."""
    return 3 * (j // 3) + (j + 2) % 3


@dataclass
class SurfaceMesh:
    """Triangle mesh with minimal half-edge incidence.

    Immutable after construction; safe for unrestricted concurrent reads.

    Attributes:
        positions: (|V|, 3) float64 vertex coordinates.
        faces: (|F|, 3) int64 vertex indices, consistently oriented.
        origin: (3|F|,) origin vertex of each half-edge.
        opposite: (3|F|,) opposite half-edge index, BOUNDARY if none.
        length: (3|F|,) positive edge lengths.
        outgoing: (|V|,) one outgoing half-edge per vertex (BOUNDARY for
            isolated vertices).  For boundary vertices this is the
            clockwise-most outgoing half-edge so that one counterclockwise
            walk covers the whole fan.
        corner_angle: (3|F|,) interior angle at ``origin[j]`` inside the
            face of ``j``, from the law of cosines on the three lengths.
        total_angle: (|V|,) sum of incident corner angles.
        vertex_class: (|V|,) uint8 codes from :class:`VertexClass`.
        on_boundary: (|V|,) bool, vertex touches a boundary edge.
    """

    positions: np.ndarray
    faces: np.ndarray
    origin: np.ndarray
    opposite: np.ndarray
    length: np.ndarray
    outgoing: np.ndarray
    corner_angle: np.ndarray
    total_angle: np.ndarray
    vertex_class: np.ndarray
    on_boundary: np.ndarray = field(repr=False, default=None)

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_half_edges(self) -> int:
        return 3 * len(self.faces)

    def dest(self, j: int) -> int:
        return int(self.origin[next_half_edge(j)])

    def classify_vertex(self, v: int) -> VertexClass:
        return VertexClass(int(self.vertex_class[v]))

    def one_ring(self, v: int) -> list[int]:
        """Neighbor vertices of ``v`` in counterclockwise order.

        For interior vertices the list is cyclic (first neighbor follows
        the last); for boundary vertices the walk spans the open fan from
        the clockwise-most to the counterclockwise-most neighbor.
        """
        h = int(self.outgoing[v])
        if h == BOUNDARY:
            return []
        start = h
        ring = []
        while True:
            ring.append(int(self.origin[next_half_edge(h)]))
            p = prev_half_edge(h)
            hn = int(self.opposite[p])
            if hn == BOUNDARY:
                ring.append(int(self.origin[p]))
                break
            h = hn
            if h == start:
                break
        return ring

    def is_boundary_half_edge(self, j: int) -> bool:
        return int(self.opposite[j]) == BOUNDARY


def _corner_angles(length: np.ndarray) -> np.ndarray:
    l3 = length.reshape(-1, 3)
    la = l3  # edge leaving the corner
    lb = np.roll(l3, 1, axis=1)  # edge arriving at the corner
    lc = np.roll(l3, -1, axis=1)  # opposite edge
    cosv = (la**2 + lb**2 - lc**2) / (2.0 * la * lb)
    return np.arccos(np.clip(cosv, -1.0, 1.0)).reshape(-1)


def classify_total_angle(total: float, eps: float = EPS_ANGLE) -> VertexClass:
    """Classify a vertex by its total incident angle against 2*pi."""
    two_pi = 2.0 * np.pi
    if total < two_pi - eps:
        return VertexClass.SPHERICAL
    if total > two_pi + eps:
        return VertexClass.SADDLE
    return VertexClass.EUCLIDEAN


def build_half_edge_mesh(positions, faces) -> SurfaceMesh:
    """Build the half-edge structure from vertex positions and triangles.

    Raises MeshError for out-of-range indices, repeated vertices within a
    face, non-manifold edges, zero-length edges and degenerate triangles.
    """
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    faces = np.ascontiguousarray(faces, dtype=np.int64)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise MeshError("positions must be (n, 3)")
    if faces.ndim != 2 or faces.shape[1] != 3:
        raise MeshError("faces must be (m, 3)")
    n_v = len(positions)
    n_f = len(faces)
    if n_f == 0:
        raise MeshError("mesh has no faces")
    if faces.min() < 0 or faces.max() >= n_v:
        raise MeshError("face index out of range")
    if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2])
              | (faces[:, 2] == faces[:, 0])):
        raise MeshError("face repeats a vertex")

    origin = faces.reshape(-1).copy()
    dest = np.roll(faces, -1, axis=1).reshape(-1)

    vec = positions[dest] - positions[origin]
    length = np.sqrt(np.sum(vec * vec, axis=1))
    if np.any(length <= 0.0):
        raise MeshError("zero-length edge")

    l3 = length.reshape(-1, 3)
    lsort = np.sort(l3, axis=1)
    if np.any(lsort[:, 0] + lsort[:, 1] - lsort[:, 2]
              <= EPS_DEGENERATE * lsort[:, 2]):
        raise MeshError("degenerate triangle (triangle inequality violated)")

    # Pair opposite half-edges by matching directed keys u*|V|+v against
    # their reversals; a duplicate directed key means a non-manifold edge
    # or inconsistent orientation.
    key = origin * np.int64(n_v) + dest
    if len(np.unique(key)) != len(key):
        raise MeshError("non-manifold edge or inconsistent face orientation")
    order = np.argsort(key)
    skey = key[order]
    rkey = dest * np.int64(n_v) + origin
    pos = np.searchsorted(skey, rkey)
    pos_clip = np.minimum(pos, len(skey) - 1)
    found = skey[pos_clip] == rkey
    opposite = np.where(found, order[pos_clip], np.int64(BOUNDARY))

    corner = _corner_angles(length)
    total = np.bincount(origin, weights=corner, minlength=n_v)

    two_pi = 2.0 * np.pi
    vclass = np.full(n_v, VertexClass.EUCLIDEAN, dtype=np.uint8)
    vclass[total < two_pi - EPS_ANGLE] = VertexClass.SPHERICAL
    vclass[total > two_pi + EPS_ANGLE] = VertexClass.SADDLE

    outgoing = np.full(n_v, BOUNDARY, dtype=np.int64)
    he_idx = np.arange(3 * n_f, dtype=np.int64)
    # reversed so the lowest-index outgoing half-edge wins
    outgoing[origin[::-1]] = he_idx[::-1]

    on_boundary = np.zeros(n_v, dtype=bool)
    bnd = he_idx[opposite == BOUNDARY]
    if len(bnd):
        on_boundary[origin[bnd]] = True
        on_boundary[dest[bnd]] = True
        vb = origin[bnd]
        if len(np.unique(vb)) != len(vb):
            raise MeshError("non-manifold vertex (multiple boundary fans)")
        # clockwise-most outgoing half-edge starts the fan walk
        outgoing[vb] = bnd

    return SurfaceMesh(
        positions=positions,
        faces=faces,
        origin=origin,
        opposite=opposite.astype(np.int64),
        length=length,
        outgoing=outgoing,
        corner_angle=corner,
        total_angle=total,
        vertex_class=vclass,
        on_boundary=on_boundary,
    )
