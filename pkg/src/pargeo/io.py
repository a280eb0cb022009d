"""Reading and writing triangle meshes (OBJ, PLY) and distance files."""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mesh import MeshError, SurfaceMesh, build_half_edge_mesh

_PLY_SCALARS = {
    "char": ("b", 1), "int8": ("b", 1),
    "uchar": ("B", 1), "uint8": ("B", 1),
    "short": ("h", 2), "int16": ("h", 2),
    "ushort": ("H", 2), "uint16": ("H", 2),
    "int": ("i", 4), "int32": ("i", 4),
    "uint": ("I", 4), "uint32": ("I", 4),
    "float": ("f", 4), "float32": ("f", 4),
    "double": ("d", 8), "float64": ("d", 8),
}


def load_mesh(path, fmt: str | None = None) -> SurfaceMesh:
    """Load a triangle mesh, dispatching on ``fmt`` or the file suffix."""
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lower().lstrip(".")
    if fmt == "obj":
        positions, faces = read_obj(path)
    elif fmt == "ply":
        positions, faces = read_ply(path)
    else:
        raise MeshError(f"unsupported mesh format: {fmt!r}")
    return build_half_edge_mesh(positions, faces)


def read_obj(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse ``v x y z`` and ``f i j k`` records (1-based, ``/`` sub-indices
    ignored).  Faces must be triangles."""
    positions = []
    faces = []
    with open(path, "r", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise MeshError(f"{path}:{lineno}: malformed vertex line")
                try:
                    positions.append([float(parts[1]), float(parts[2]),
                                      float(parts[3])])
                except ValueError as exc:
                    raise MeshError(
                        f"{path}:{lineno}: malformed vertex line") from exc
            elif tag == "f":
                idx = parts[1:]
                if len(idx) != 3:
                    raise MeshError(f"{path}:{lineno}: non-triangle face")
                tri = []
                for token in idx:
                    head = token.split("/")[0]
                    try:
                        i = int(head)
                    except ValueError as exc:
                        raise MeshError(
                            f"{path}:{lineno}: malformed face index") from exc
                    if i <= 0:
                        raise MeshError(
                            f"{path}:{lineno}: face index must be positive")
                    tri.append(i - 1)
                faces.append(tri)
    if not positions:
        raise MeshError(f"{path}: no vertices")
    if not faces:
        raise MeshError(f"{path}: no faces")
    return (np.asarray(positions, dtype=np.float64),
            np.asarray(faces, dtype=np.int64))


def write_obj(path, positions, faces) -> None:
    with open(path, "w") as fh:
        for p in np.asarray(positions, dtype=np.float64):
            fh.write(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for f in np.asarray(faces, dtype=np.int64):
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def _parse_ply_header(blob: bytes):
    end = blob.find(b"end_header")
    if end < 0:
        raise MeshError("PLY: missing end_header")
    nl = blob.find(b"\n", end)
    header = blob[:nl].decode("ascii", errors="replace")
    body = blob[nl + 1:]
    lines = [ln.strip() for ln in header.splitlines() if ln.strip()]
    if not lines or lines[0] != "ply":
        raise MeshError("PLY: bad magic")
    fmt = None
    elements = []  # (name, count, [(prop_kind, ...)])
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "comment":
            continue
        if parts[0] == "format":
            fmt = parts[1]
        elif parts[0] == "element":
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise MeshError("PLY: property before element")
            if parts[1] == "list":
                elements[-1][2].append(("list", parts[2], parts[3], parts[4]))
            else:
                elements[-1][2].append(("scalar", parts[1], parts[2]))
        elif parts[0] == "end_header":
            break
    if fmt not in ("ascii", "binary_little_endian"):
        raise MeshError(f"PLY: unsupported format {fmt!r}")
    return fmt, elements, body


def read_ply(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ASCII or binary-little-endian PLY; returns positions and faces."""
    blob = Path(path).read_bytes()
    fmt, elements, body = _parse_ply_header(blob)
    positions = None
    faces = None
    if fmt == "ascii":
        tokens = body.decode("ascii", errors="replace").split()
        cursor = 0
        for name, count, props in elements:
            if name == "vertex":
                cols = {}
                row_width = len(props)
                for k, p in enumerate(props):
                    if p[0] != "scalar":
                        raise MeshError("PLY: list property on vertex")
                    cols[p[2]] = k
                for axis in ("x", "y", "z"):
                    if axis not in cols:
                        raise MeshError(f"PLY: vertex missing {axis}")
                data = np.array(tokens[cursor:cursor + count * row_width],
                                dtype=np.float64).reshape(count, row_width)
                cursor += count * row_width
                positions = data[:, [cols["x"], cols["y"], cols["z"]]]
            elif name == "face":
                rows = []
                for _ in range(count):
                    n = int(tokens[cursor]); cursor += 1
                    if n != 3:
                        raise MeshError("PLY: non-triangle face")
                    rows.append([int(tokens[cursor]), int(tokens[cursor + 1]),
                                 int(tokens[cursor + 2])])
                    cursor += 3
                faces = np.asarray(rows, dtype=np.int64)
            else:
                # skip unknown scalar-only elements
                width = len(props)
                if any(p[0] == "list" for p in props):
                    raise MeshError(f"PLY: cannot skip list element {name!r}")
                cursor += count * width
    else:
        off = 0
        for name, count, props in elements:
            if name == "vertex":
                names = []
                fmt_codes = []
                for p in props:
                    if p[0] != "scalar":
                        raise MeshError("PLY: list property on vertex")
                    code, _ = _PLY_SCALARS[p[1]]
                    names.append(p[2])
                    fmt_codes.append(code)
                rec = struct.Struct("<" + "".join(fmt_codes))
                data = np.zeros((count, 3), dtype=np.float64)
                ix, iy, iz = (names.index("x"), names.index("y"),
                              names.index("z"))
                for i in range(count):
                    vals = rec.unpack_from(body, off)
                    off += rec.size
                    data[i, 0] = vals[ix]
                    data[i, 1] = vals[iy]
                    data[i, 2] = vals[iz]
                positions = data
            elif name == "face":
                if len(props) != 1 or props[0][0] != "list":
                    raise MeshError("PLY: unsupported face properties")
                ccode, csize = _PLY_SCALARS[props[0][1]]
                icode, isize = _PLY_SCALARS[props[0][2]]
                cstruct = struct.Struct("<" + ccode)
                faces_arr = np.zeros((count, 3), dtype=np.int64)
                tri = struct.Struct("<" + icode * 3)
                for i in range(count):
                    n = cstruct.unpack_from(body, off)[0]
                    off += csize
                    if n != 3:
                        raise MeshError("PLY: non-triangle face")
                    faces_arr[i] = tri.unpack_from(body, off)
                    off += 3 * isize
                faces = faces_arr
            else:
                widths = []
                for p in props:
                    if p[0] == "list":
                        raise MeshError(
                            f"PLY: cannot skip list element {name!r}")
                    widths.append(_PLY_SCALARS[p[1]][1])
                off += count * sum(widths)
    if positions is None or faces is None:
        raise MeshError("PLY: missing vertex or face element")
    return positions, faces


def write_ply(path, positions, faces, distances=None, binary=True) -> None:
    """Write a PLY file, optionally with a per-vertex float64
    ``geodesic_distance`` property.  Binary little-endian by default."""
    positions = np.asarray(positions, dtype=np.float64)
    faces = np.asarray(faces, dtype=np.int64)
    if distances is not None:
        distances = np.asarray(distances, dtype=np.float64)
        if len(distances) != len(positions):
            raise MeshError("distances length does not match vertex count")
    header = ["ply"]
    header.append("format binary_little_endian 1.0" if binary
                  else "format ascii 1.0")
    header.append(f"element vertex {len(positions)}")
    header += ["property double x", "property double y", "property double z"]
    if distances is not None:
        header.append("property double geodesic_distance")
    header.append(f"element face {len(faces)}")
    header.append("property list uchar int vertex_indices")
    header.append("end_header")
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        if binary:
            if distances is not None:
                vdata = np.column_stack([positions, distances])
            else:
                vdata = positions
            fh.write(np.ascontiguousarray(vdata, dtype="<f8").tobytes())
            fdata = np.empty((len(faces), 13), dtype=np.uint8)
            fdata[:, 0] = 3
            fdata[:, 1:] = faces.astype("<i4").view(np.uint8).reshape(-1, 12)
            fh.write(fdata.tobytes())
        else:
            lines = []
            for i, p in enumerate(positions):
                row = f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}"
                if distances is not None:
                    row += f" {distances[i]:.17g}"
                lines.append(row)
            for f in faces:
                lines.append(f"3 {f[0]} {f[1]} {f[2]}")
            fh.write(("\n".join(lines) + "\n").encode("ascii"))


def write_distances(path_or_file, distances) -> None:
    """One ``index<TAB>distance`` line per vertex, 17 significant digits,
    ``inf`` for unreachable vertices."""
    distances = np.asarray(distances, dtype=np.float64)
    own = isinstance(path_or_file, (str, Path))
    fh = open(path_or_file, "w") if own else path_or_file
    try:
        for i, d in enumerate(distances):
            fh.write(f"{i}\t{d:.17g}\n")
    finally:
        if own:
            fh.close()


def read_distances(path) -> np.ndarray:
    """Parse a distance file written by :func:`write_distances`."""
    idx = []
    vals = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2:
                raise MeshError(f"{path}:{lineno}: malformed distance line")
            idx.append(int(parts[0]))
            vals.append(float(parts[1]))
    out = np.full(max(idx) + 1 if idx else 0, np.inf)
    out[np.asarray(idx, dtype=np.int64)] = vals
    return out


def read_sources(path) -> list[int]:
    """Whitespace-separated vertex indices; ``#`` starts a comment."""
    out = []
    with open(path) as fh:
        for line in fh:
            body = line.split("#", 1)[0]
            for token in body.split():
                out.append(int(token))
    return out
