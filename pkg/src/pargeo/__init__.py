"""Exact geodesic distance fields on triangle meshes by batch-parallel
window propagation, with a sequential reference engine and oracles."""

from .engine import (AngleSplitTable, EngineConfig, EngineGuard, RunStats,
                     WindowPool, apply_distance_events, apply_angle_events,
                     apply_events, compact, compact_buffers,
                     exclusive_prefix_sum, run_ich, run_pch, select_nearest,
                     propagate_batch)
from .geom import (InvalidWindow, UpdateEvent, Window, create_fan_windows,
                   create_source_windows, ich_prune, propagate_window,
                   unfold_pseudo_source, window_key)
from .io import (load_mesh, read_distances, read_obj, read_ply,
                 read_sources, write_distances, write_obj, write_ply)
from .mesh import (BOUNDARY, MeshError, SurfaceMesh, VertexClass,
                   build_half_edge_mesh, classify_total_angle,
                   next_half_edge, prev_half_edge)
from .oracle import brute_force_geodesic, run_dijkstra

__version__ = "0.1.0"

__all__ = [
    "AngleSplitTable", "BOUNDARY", "EngineConfig", "EngineGuard",
    "InvalidWindow", "MeshError", "RunStats", "SurfaceMesh", "UpdateEvent",
    "VertexClass", "Window", "WindowPool", "apply_angle_events",
    "apply_distance_events", "apply_events", "brute_force_geodesic",
    "build_half_edge_mesh", "classify_total_angle", "compact",
    "compact_buffers", "create_fan_windows", "create_source_windows",
    "exclusive_prefix_sum", "ich_prune", "load_mesh", "next_half_edge",
    "prev_half_edge", "propagate_batch", "propagate_window",
    "read_distances", "read_obj", "read_ply", "read_sources", "run_dijkstra",
    "run_ich", "run_pch", "select_nearest", "unfold_pseudo_source",
    "window_key", "write_distances", "write_obj", "write_ply",
]
