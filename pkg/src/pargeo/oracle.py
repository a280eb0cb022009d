"""Reference distance computations used to validate the engines.

run_dijkstra bounds geodesic distances from above by shortest paths
restricted to mesh edges.  brute_force_geodesic is an exact oracle for
tiny meshes: it enumerates simple face strips, lays them out in the plane
directly from the 3D vertex coordinates, takes every straight unblocked
segment to a vertex, and relaxes through saddle vertices until a fixed
point.  It shares no code with the window kernel.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .engine import EngineGuard
from .mesh import SurfaceMesh, VertexClass

BRUTE_FORCE_MAX_FACES = 60
_CONE_SLACK = 1e-12


def run_dijkstra(mesh: SurfaceMesh, sources) -> np.ndarray:
    """Per-vertex upper bounds: shortest paths along mesh edges."""
    sources = [int(s) for s in sources]
    if not sources:
        raise ValueError("at least one source vertex is required")
    for s in sources:
        if s < 0 or s >= mesh.n_vertices:
            raise ValueError(f"invalid source index {s}")
    dest = np.roll(mesh.faces, -1, axis=1).reshape(-1)
    graph = csr_matrix((mesh.length, (mesh.origin, dest)),
                       shape=(mesh.n_vertices, mesh.n_vertices))
    out = _csgraph_dijkstra(graph, directed=False, indices=sources)
    return out.min(axis=0) if out.ndim == 2 else out


def _edge_faces(faces: np.ndarray) -> dict:
    adj: dict[tuple[int, int], list[int]] = {}
    for t, (a, b, c) in enumerate(faces):
        for u, v in ((a, b), (b, c), (c, a)):
            adj.setdefault((min(u, v), max(u, v)), []).append(t)
    return adj


def _lay_triangle(positions, tri):
    """Isometric 2D layout of one triangle, first vertex at the origin."""
    pa, pb, pc = positions[tri[0]], positions[tri[1]], positions[tri[2]]
    lab = float(np.linalg.norm(pb - pa))
    lac = float(np.linalg.norm(pc - pa))
    lbc = float(np.linalg.norm(pc - pb))
    ax = (lab * lab + lac * lac - lbc * lbc) / (2.0 * lab)
    ay = math.sqrt(max(lac * lac - ax * ax, 0.0))
    return np.array([[0.0, 0.0], [lab, 0.0], [ax, ay]])


def _unfold_apex(positions, x2d, y2d, xi, yi, zi):
    """2D position of vertex ``zi`` unfolded across segment (xi, yi).

    The apex lands on the far side of the segment from the origin, which
    is always the strip side: every admissible ray from the origin is
    inside the current face just before crossing the segment.
    """
    px, py = positions[xi], positions[yi]
    lxy = float(np.linalg.norm(py - px))
    lxz = float(np.linalg.norm(positions[zi] - px))
    lyz = float(np.linalg.norm(positions[zi] - py))
    t = (lxy * lxy + lxz * lxz - lyz * lyz) / (2.0 * lxy)
    h = math.sqrt(max(lxz * lxz - t * t, 0.0))
    e = (y2d - x2d) / lxy
    perp = np.array([-e[1], e[0]])
    cross_origin = e[0] * (-x2d[1]) - e[1] * (-x2d[0])
    sign = -1.0 if cross_origin > 0.0 else 1.0
    return x2d + t * e + sign * h * perp


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _in_arc(lo, hi, v) -> bool:
    s1 = _CONE_SLACK * float(np.linalg.norm(lo) * np.linalg.norm(v))
    s2 = _CONE_SLACK * float(np.linalg.norm(hi) * np.linalg.norm(v))
    return _cross(lo, v) >= -s1 and _cross(v, hi) >= -s2


def _clip_cone(cr, cl, a, b):
    """Intersect the direction cone [cr, cl] (counterclockwise, under pi
    wide) with the arc subtended by directions a, b (unordered).  Returns
    (new_cr, new_cl, nonempty)."""
    if _cross(a, b) < 0.0:
        a, b = b, a
    ncr = a if _cross(cr, a) > 0.0 else cr
    ncl = b if _cross(b, cl) > 0.0 else cl
    ok = (_in_arc(cr, cl, ncr) and _in_arc(a, b, ncr)
          and _in_arc(cr, cl, ncl) and _in_arc(a, b, ncl)
          and _cross(ncr, ncl) >= -_CONE_SLACK
          * float(np.linalg.norm(ncr) * np.linalg.norm(ncl)))
    return ncr, ncl, ok


def _scan_from(mesh, vertex_faces, edge_faces, p, base, best, max_faces):
    """Relax ``best`` with straight unfolded segments from vertex p."""
    positions = mesh.positions
    faces = mesh.faces
    for start_face in vertex_faces[p]:
        tri = list(int(v) for v in faces[start_face])
        k = tri.index(p)
        tri = [tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]]
        lay = _lay_triangle(positions, tri)
        for vid, pt in zip(tri[1:], lay[1:]):
            d = base + float(np.linalg.norm(pt))
            if d < best[vid]:
                best[vid] = d
        q2d, r2d = lay[1], lay[2]
        if _cross(q2d, r2d) > 0.0:
            cr, cl = q2d, r2d
            xi, yi, x2d, y2d = tri[1], tri[2], q2d, r2d
        else:
            cr, cl = r2d, q2d
            xi, yi, x2d, y2d = tri[2], tri[1], r2d, q2d
        stack = [(start_face, xi, yi, x2d, y2d, cr, cl,
                  1 << start_face, 1)]
        while stack:
            face, xi, yi, x2d, y2d, cr, cl, visited, depth = stack.pop()
            if depth >= max_faces:
                continue
            key = (min(xi, yi), max(xi, yi))
            nxt = [f for f in edge_faces[key] if f != face]
            if not nxt:
                continue  # boundary edge: the strip ends here
            nface = nxt[0]
            if visited & (1 << nface):
                continue
            zi = int([v for v in faces[nface] if v != xi and v != yi][0])
            z2d = _unfold_apex(positions, x2d, y2d, xi, yi, zi)
            if _in_arc(cr, cl, z2d):
                d = base + float(np.linalg.norm(z2d))
                if d < best[zi]:
                    best[zi] = d
            nvis = visited | (1 << nface)
            for ai, bi, a2d, b2d in ((xi, zi, x2d, z2d),
                                     (zi, yi, z2d, y2d)):
                ncr, ncl, ok = _clip_cone(cr, cl, a2d, b2d)
                if ok:
                    stack.append((nface, ai, bi, a2d, b2d, ncr, ncl,
                                  nvis, depth + 1))


def brute_force_geodesic(mesh: SurfaceMesh, source: int,
                         max_faces: int | None = None) -> np.ndarray:
    """Exact geodesic distances on a tiny mesh by exhaustive unfolding.

    Enumerates simple face strips (at most ``max_faces`` long) from the
    source and from every saddle vertex reached, keeping per vertex the
    shortest straight segment whose direction stays inside the strip's
    visibility cone; saddle relays repeat until no distance improves.
    Raises EngineGuard on meshes beyond the practical size.
    """
    if mesh.n_faces > BRUTE_FORCE_MAX_FACES:
        raise EngineGuard("mesh too large for brute-force oracle")
    source = int(source)
    if source < 0 or source >= mesh.n_vertices:
        raise ValueError(f"invalid source index {source}")
    if max_faces is None:
        max_faces = min(mesh.n_faces, 40)

    vertex_faces: dict[int, list[int]] = {}
    for t, tri in enumerate(mesh.faces):
        for v in tri:
            vertex_faces.setdefault(int(v), []).append(t)
    edge_faces = _edge_faces(mesh.faces)

    best = np.full(mesh.n_vertices, np.inf)
    best[source] = 0.0
    saddles = [v for v in range(mesh.n_vertices)
               if mesh.vertex_class[v] == VertexClass.SADDLE]

    _scan_from(mesh, vertex_faces, edge_faces, source, 0.0, best, max_faces)
    last_scanned = {source: 0.0}
    for _ in range(mesh.n_vertices + 1):
        changed = False
        for v in sorted(saddles, key=lambda u: best[u]):
            if not np.isfinite(best[v]):
                continue
            if v in last_scanned and last_scanned[v] <= best[v]:
                continue
            base = float(best[v])
            _scan_from(mesh, vertex_faces, edge_faces, v, base, best,
                       max_faces)
            last_scanned[v] = base
            changed = True
        if not changed:
            break
    return best
