import hypothesis
import numpy as np
import pytest

from pargeo import meshes
from pargeo.mesh import build_half_edge_mesh

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=100)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def tiny_corpus():
    return meshes.tiny_corpus()


@pytest.fixture(scope="session")
def cube():
    return meshes.make("cube")


@pytest.fixture(scope="session")
def icospheres():
    """Subdivided spheres at 320 .. 20480 faces, mean edge length one."""
    out = {}
    for sub in (2, 3, 4, 5):
        positions, faces = meshes.normalize_edge_scale(*meshes.icosphere(sub))
        out[20 * 4 ** sub] = build_half_edge_mesh(positions, faces)
    return out


@pytest.fixture(scope="session")
def scanned_meshes():
    """Stand-ins for scanned assets: large, generic, saddle-rich surfaces
    at 50K-150K faces with edges of order one."""
    out = {}
    for name, (positions, faces) in (
            ("bumpy_sphere", meshes.bumpy_sphere(6)),
            ("bumpy_torus", meshes.bumpy_torus(220, 160)),
            ("disk_patch", meshes.disk_patch(92))):
        positions, faces = meshes.normalize_edge_scale(positions, faces)
        out[name] = build_half_edge_mesh(positions, faces)
    return out


def max_rel_dev(a, b, floor=1e-12):
    """Largest relative deviation, requiring matching infinities."""
    a = np.asarray(a)
    b = np.asarray(b)
    if not np.array_equal(np.isfinite(a), np.isfinite(b)):
        return np.inf
    both = np.isfinite(a)
    if not both.any():
        return 0.0
    return float(np.max(np.abs(a[both] - b[both])
                        / np.maximum(np.abs(b[both]), floor)))


@pytest.fixture(scope="session")
def rel_dev():
    return max_rel_dev
