"""Distance-field engines: batch-parallel window propagation and a
sequential priority-queue reference.

The batch engine repeats four strictly separated phases until no window
remains: (1) select the k windows nearest the sources, (2) propagate them
across workers that share read-only state and write only worker-private
buffers, (3) compact the per-worker buffers into the gap-free active pool
by prefix-sum offsets, (4) sort and apply the deferred update events.  No
phase mutates what another phase is reading, so no locks or atomics are
involved, and sorted first-event-wins application makes results
independent of worker scheduling.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, fields

import numpy as np

warnings.filterwarnings("ignore", message=".*TBB.*")

from numba import njit, prange, set_num_threads, config as _numba_config

from .geom import (AEV_COLS, AE_COMP, AE_ENTRYX, C_CREATED, C_EV_APPLIED,
                   C_EV_CREATED, C_MAXCHILD, C_PROPAGATED, C_PRUNE_DEGEN,
                   C_PRUNE_ICH, C_PRUNE_SPLIT, C_PRUNE_TINY, EPS_NUM,
                   EPS_WINDOW, N_COUNTERS, WIN_COLS, W_B0, W_B1, W_D, W_D0,
                   W_D1, W_HE, W_KEY, _create_source_windows,
                   _propagate_window)
from .mesh import SurfaceMesh

DEFAULT_WORKERS = max(1, _numba_config.NUMBA_NUM_THREADS)

SELECTION_MODES = ("exact", "approximate_strided")
FAN_MODES = ("clip", "full_edges")


class EngineGuard(RuntimeError):
    """A configured safety guard stopped the run."""


@dataclass
class EngineConfig:
    """Engine parameters.

    k is the per-iteration selection size; workers is the logical worker
    count T (results are identical for any T, only the batch partition
    changes).  selection_mode "approximate_strided" has worker i examine
    pool positions i, i+T, i+2T, ... and keep its ceil(k/T) locally
    nearest windows, trading selection exactness for a single pass.
    fan_mode "full_edges" emits un-clipped fan windows and lets the
    filters cull them; "clip" trims them to the fan boundary rays.
    """

    k: int = 4096
    workers: int = DEFAULT_WORKERS
    selection_mode: str = "exact"
    epsilon_window: float = EPS_WINDOW
    seed: int = 0
    max_iterations: int | None = None
    fan_mode: str = "clip"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.selection_mode not in SELECTION_MODES:
            raise ValueError(f"selection_mode must be one of {SELECTION_MODES}")
        if self.fan_mode not in FAN_MODES:
            raise ValueError(f"fan_mode must be one of {FAN_MODES}")


@dataclass
class RunStats:
    """Run accounting; serializes to a flat key-value dict."""

    algorithm: str = ""
    iterations: int = 0
    windows_propagated: int = 0
    total_windows_created: int = 0
    total_windows_pruned: int = 0
    pruned_ich: int = 0
    pruned_split: int = 0
    pruned_tiny: int = 0
    pruned_degenerate: int = 0
    pruned_duplicate: int = 0
    windows_stored: int = 0
    max_children_per_window: int = 0
    events_created: int = 0
    events_applied: int = 0
    peak_active_pool: int = 0
    buffer_regrows: int = 0
    time_total: float = 0.0
    time_select: float = 0.0
    time_propagate: float = 0.0
    time_compact: float = 0.0
    time_events: float = 0.0

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v
        return out

    def _absorb_counters(self, counters: np.ndarray) -> None:
        c = counters.sum(axis=0) if counters.ndim == 2 else counters
        self.windows_propagated += int(c[C_PROPAGATED])
        self.total_windows_created += int(c[C_CREATED])
        self.pruned_ich += int(c[C_PRUNE_ICH])
        self.pruned_split += int(c[C_PRUNE_SPLIT])
        self.pruned_tiny += int(c[C_PRUNE_TINY])
        self.pruned_degenerate += int(c[C_PRUNE_DEGEN])
        self.total_windows_pruned += int(c[C_PRUNE_ICH] + c[C_PRUNE_SPLIT]
                                         + c[C_PRUNE_TINY] + c[C_PRUNE_DEGEN])
        if counters.ndim == 2:
            mc = int(counters[:, C_MAXCHILD].max())
        else:
            mc = int(c[C_MAXCHILD])
        self.max_children_per_window = max(self.max_children_per_window, mc)


@dataclass
class AngleSplitTable:
    """Per half-edge, the window currently winning the corner angle it
    faces, with its cached comparison distance and apex-ray entry
    position.  comp == inf marks an empty entry."""

    comp: np.ndarray
    entry_x: np.ndarray
    window: np.ndarray

    @staticmethod
    def empty(n_half_edges: int) -> "AngleSplitTable":
        return AngleSplitTable(
            comp=np.full(n_half_edges, np.inf),
            entry_x=np.zeros(n_half_edges),
            window=np.zeros((n_half_edges, WIN_COLS)),
        )


@dataclass
class WindowPool:
    """Gap-free active window store plus per-worker output buffers.

    Buffers are disjoint slices of one backing array; buffer_address
    records each worker's (start, size)."""

    active: np.ndarray
    buffers: np.ndarray
    counts: np.ndarray

    @staticmethod
    def create(workers: int, capacity: int, active=None) -> "WindowPool":
        if active is None:
            active = np.empty((0, WIN_COLS))
        return WindowPool(
            active=active,
            buffers=np.empty((workers, capacity, WIN_COLS)),
            counts=np.zeros(workers, dtype=np.int64),
        )

    @property
    def capacity(self) -> int:
        return self.buffers.shape[1]

    @property
    def buffer_address(self) -> list[tuple[int, int]]:
        cap = self.capacity
        return [(w * cap, int(self.counts[w])) for w in range(len(self.counts))]

    def grow(self) -> None:
        t, cap, c = self.buffers.shape
        self.buffers = np.empty((t, 2 * cap, c))


def exclusive_prefix_sum(counts) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.int64)
    out = np.zeros(len(counts), dtype=np.int64)
    if len(counts) > 1:
        np.cumsum(counts[:-1], out=out[1:])
    return out


def compact_buffers(buffers: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Copy per-worker buffer contents into one gap-free array, each
    worker's block landing at its exclusive-prefix-sum offset."""
    offsets = exclusive_prefix_sum(counts)
    total = int(np.sum(counts))
    out = np.empty((total, buffers.shape[2]))
    for w in range(len(counts)):
        c = int(counts[w])
        if c:
            out[offsets[w]:offsets[w] + c] = buffers[w, :c]
    return out


def dedupe_rows(rows: np.ndarray) -> np.ndarray:
    """Drop exact duplicate rows, keeping first occurrences in order.

    Same-batch ties at a saddle vertex make every tying window emit an
    identical fan (deferred updates cannot stop the later ones); exact
    twins carry no information but would otherwise propagate identically
    forever, so they are removed here."""
    if len(rows) < 2:
        return rows
    flat = np.ascontiguousarray(rows).view(
        [("", rows.dtype)] * rows.shape[1]).ravel()
    _, first = np.unique(flat, return_index=True)
    if len(first) == len(rows):
        return rows
    return rows[np.sort(first)]


def compact(pool: WindowPool, dedupe: bool = False) -> tuple[int, int]:
    """Append buffered windows to the active store and empty the buffers.

    Returns (appended, duplicates_dropped); duplicates are only dropped
    from the newly appended block, and only when ``dedupe`` is set."""
    new = compact_buffers(pool.buffers, pool.counts)
    pool.counts[:] = 0
    dropped = 0
    if dedupe:
        kept = dedupe_rows(new)
        dropped = len(new) - len(kept)
        new = kept
    if len(new):
        pool.active = np.concatenate([pool.active, new])
    return len(new), dropped


def select_nearest(pool: WindowPool, k: int, mode: str = "exact",
                   workers: int = 1) -> np.ndarray:
    """Remove and return (about) the k windows nearest the sources.

    exact: the k smallest window keys (quickselect semantics, unordered).
    approximate_strided: worker i examines positions i, i+T, i+2T, ... and
    returns its ceil(k/T) locally nearest; the union can differ from the
    exact k nearest and may slightly exceed k.  If the pool holds at most
    k windows, everything is returned."""
    active = pool.active
    n = len(active)
    if n == 0:
        return active
    if n <= k:
        pool.active = active[:0]
        return active
    keys = active[:, W_KEY]
    mask = np.zeros(n, dtype=bool)
    if mode == "exact":
        idx = np.argpartition(keys, k - 1)[:k]
        mask[idx] = True
    elif mode == "approximate_strided":
        m = -(-k // workers)
        for w in range(workers):
            sub = keys[w::workers]
            if len(sub) <= m:
                mask[w::workers] = True
            else:
                loc = np.argpartition(sub, m - 1)[:m]
                mask[w + workers * loc] = True
    else:
        raise ValueError(f"unknown selection mode {mode!r}")
    selected = active[mask]
    pool.active = active[~mask]
    return selected


@njit(parallel=True, cache=True)
def _batch_propagate(selected, workers, share, origin, opposite, length,
                     corner_angle, vclass, geod_dist, split_comp,
                     split_entryx, eps_win, eps_num, fan_full_edges,
                     win_buf, win_cnt, dev_buf, dev_cnt, aev_buf, aev_cnt,
                     counters, flags):
    total = selected.shape[0]
    for w in prange(workers):
        lo = w * share
        hi = lo + share
        if hi > total:
            hi = total
        nw = 0
        nd = 0
        na = 0
        bad = 0
        i = lo
        while i < hi:
            nw, nd, na, ok = _propagate_window(
                selected[i], origin, opposite, length, corner_angle, vclass,
                geod_dist, split_comp, split_entryx, eps_win, eps_num,
                fan_full_edges, win_buf[w], nw, dev_buf[w], nd,
                aev_buf[w], na, counters[w])
            if not ok:
                bad = 1
                break
            i += 1
        flags[w] = bad
        win_cnt[w] = nw
        dev_cnt[w] = nd
        aev_cnt[w] = na


def propagate_batch(selected: np.ndarray, mesh: SurfaceMesh, dist, split,
                    pool: WindowPool, config: EngineConfig,
                    stats: RunStats | None = None):
    """Phase 2: propagate the selected windows across the workers.

    Windows land in the pool's per-worker buffers; distance and angle
    events are returned as per-worker buffers for compaction.  A full
    window buffer doubles capacity and recomputes the batch (propagation
    is pure, so the redo is exact)."""
    t = config.workers
    share = max(1, -(-len(selected) // t))
    dev_buf = np.empty((t, 3 * share + 4, 2))
    dev_cnt = np.zeros(t, dtype=np.int64)
    aev_buf = np.empty((t, share + 4, AEV_COLS))
    aev_cnt = np.zeros(t, dtype=np.int64)
    flags = np.zeros(t, dtype=np.int64)
    fan_full = config.fan_mode == "full_edges"
    while True:
        counters = np.zeros((t, N_COUNTERS), dtype=np.int64)
        _batch_propagate(selected, t, share, mesh.origin, mesh.opposite,
                         mesh.length, mesh.corner_angle, mesh.vertex_class,
                         dist, split.comp, split.entry_x,
                         config.epsilon_window, EPS_NUM, fan_full,
                         pool.buffers, pool.counts, dev_buf, dev_cnt,
                         aev_buf, aev_cnt, counters, flags)
        if not flags.any():
            break
        pool.grow()
        if stats is not None:
            stats.buffer_regrows += 1
    if stats is not None:
        stats._absorb_counters(counters)
        stats.events_created += int(dev_cnt.sum() + aev_cnt.sum())
    return dev_buf, dev_cnt, aev_buf, aev_cnt


def apply_distance_events(events: np.ndarray, dist: np.ndarray) -> int:
    """Sort (vertex, distance) events, keep the first per vertex, apply it
    when it still improves the stored value.  Returns the applied count."""
    m = len(events)
    if m == 0:
        return 0
    order = np.lexsort((events[:, 1], events[:, 0]))
    ev = events[order]
    first = np.empty(m, dtype=bool)
    first[0] = True
    first[1:] = ev[1:, 0] != ev[:-1, 0]
    verts = ev[first, 0].astype(np.int64)
    vals = ev[first, 1]
    improve = vals < dist[verts]
    dist[verts[improve]] = vals[improve]
    return int(np.count_nonzero(improve))


def apply_angle_events(events: np.ndarray, split: AngleSplitTable) -> int:
    """Sort angle-claim events by (half-edge, window key, remaining window
    fields), keep the first per angle, store it when its comparison
    distance still improves the table entry."""
    m = len(events)
    if m == 0:
        return 0
    order = np.lexsort((events[:, AE_ENTRYX], events[:, W_D],
                        events[:, W_D1], events[:, W_D0], events[:, W_B1],
                        events[:, W_B0], events[:, AE_COMP],
                        events[:, W_KEY], events[:, W_HE]))
    ev = events[order]
    first = np.empty(m, dtype=bool)
    first[0] = True
    first[1:] = ev[1:, W_HE] != ev[:-1, W_HE]
    evf = ev[first]
    hes = evf[:, W_HE].astype(np.int64)
    comp = evf[:, AE_COMP]
    improve = comp < split.comp[hes]
    hit = hes[improve]
    split.comp[hit] = comp[improve]
    split.entry_x[hit] = evf[improve, AE_ENTRYX]
    split.window[hit] = evf[improve, :WIN_COLS]
    return int(np.count_nonzero(improve))


def apply_events(dev: np.ndarray, aev: np.ndarray, dist: np.ndarray,
                 split: AngleSplitTable) -> int:
    """Phase 4 entry point; returns the total number of applied events."""
    return (apply_distance_events(dev, dist)
            + apply_angle_events(aev, split))


def _check_sources(mesh: SurfaceMesh, sources) -> list[int]:
    sources = [int(s) for s in sources]
    if not sources:
        raise ValueError("at least one source vertex is required")
    for s in sources:
        if s < 0 or s >= mesh.n_vertices:
            raise ValueError(f"invalid source index {s}")
    return sorted(set(sources))


def _source_rows(mesh: SurfaceMesh, sources, dist, eps_win,
                 stats: RunStats | None) -> np.ndarray:
    cap = 1024
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    chunks = []
    for s in sources:
        h = int(mesh.outgoing[s])
        if h < 0:
            continue
        while True:
            buf = np.empty((cap, WIN_COLS))
            saved = counters.copy()
            nw, _ = _create_source_windows(
                s, h, mesh.origin, mesh.opposite, mesh.length,
                mesh.corner_angle, dist, eps_win, EPS_NUM, buf, 0, counters)
            if nw >= 0:
                chunks.append(buf[:nw].copy())
                break
            counters[:] = saved
            cap *= 2
    if stats is not None:
        stats._absorb_counters(counters)
    if not chunks:
        return np.empty((0, WIN_COLS))
    return np.concatenate(chunks)


def _engine_threads(workers: int) -> None:
    set_num_threads(max(1, min(workers, _numba_config.NUMBA_NUM_THREADS)))


def run_pch(mesh: SurfaceMesh, sources, config: EngineConfig | None = None):
    """Batch-parallel exact geodesic distances from the source vertices.

    Returns (distance_field, stats).  The result is independent of k,
    worker count and selection mode up to floating-point noise."""
    config = config or EngineConfig()
    sources = _check_sources(mesh, sources)
    t_start = time.perf_counter()
    dist = np.full(mesh.n_vertices, np.inf)
    dist[sources] = 0.0
    split = AngleSplitTable.empty(mesh.n_half_edges)
    stats = RunStats(algorithm="pch")
    active = _source_rows(mesh, sources, dist, config.epsilon_window, stats)
    stats.windows_stored += len(active)
    t = config.workers
    cap = max(4 * (-(-config.k // t)), 64)
    pool = WindowPool.create(t, cap, active)
    _engine_threads(t)

    while len(pool.active):
        stats.peak_active_pool = max(stats.peak_active_pool,
                                     len(pool.active))
        t0 = time.perf_counter()
        selected = select_nearest(pool, config.k, config.selection_mode, t)
        t1 = time.perf_counter()
        dev_buf, dev_cnt, aev_buf, aev_cnt = propagate_batch(
            selected, mesh, dist, split, pool, config, stats)
        t2 = time.perf_counter()
        n_new, n_dup = compact(pool, dedupe=True)
        stats.windows_stored += n_new
        stats.pruned_duplicate += n_dup
        stats.total_windows_pruned += n_dup
        dev = compact_buffers(dev_buf, dev_cnt)
        aev = compact_buffers(aev_buf, aev_cnt)
        t3 = time.perf_counter()
        stats.events_applied += apply_events(dev, aev, dist, split)
        t4 = time.perf_counter()
        stats.time_select += t1 - t0
        stats.time_propagate += t2 - t1
        stats.time_compact += t3 - t2
        stats.time_events += t4 - t3
        stats.iterations += 1
        if (config.max_iterations is not None
                and stats.iterations > config.max_iterations):
            raise EngineGuard(
                f"iteration cap {config.max_iterations} exceeded")
    stats.time_total = time.perf_counter() - t_start
    return dist, stats


# ---------------------------------------------------------------------------
# sequential reference engine: a min-priority queue on the window key


@njit(cache=True)
def _heap_less(hkey, hseq, i, j):
    if hkey[i] != hkey[j]:
        return hkey[i] < hkey[j]
    return hseq[i] < hseq[j]


@njit(cache=True)
def _heap_swap(hkey, hseq, hwin, i, j):
    hkey[i], hkey[j] = hkey[j], hkey[i]
    hseq[i], hseq[j] = hseq[j], hseq[i]
    for c in range(WIN_COLS):
        tmp = hwin[i, c]
        hwin[i, c] = hwin[j, c]
        hwin[j, c] = tmp


@njit(cache=True)
def _sift_up(hkey, hseq, hwin, i):
    while i > 0:
        p = (i - 1) // 2
        if _heap_less(hkey, hseq, i, p):
            _heap_swap(hkey, hseq, hwin, i, p)
            i = p
        else:
            break


@njit(cache=True)
def _sift_down(hkey, hseq, hwin, size, i):
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        m = l
        r = l + 1
        if r < size and _heap_less(hkey, hseq, r, l):
            m = r
        if _heap_less(hkey, hseq, m, i):
            _heap_swap(hkey, hseq, hwin, i, m)
            i = m
        else:
            break


@njit(cache=True)
def _ich_run(init_win, origin, opposite, length, corner_angle, vclass,
             geod_dist, split_comp, split_entryx, split_win,
             eps_win, eps_num, fan_full_edges, counters):
    n0 = init_win.shape[0]
    cap = 1024
    while cap < 2 * n0 + 16:
        cap *= 2
    hkey = np.empty(cap)
    hseq = np.empty(cap, np.int64)
    hwin = np.empty((cap, WIN_COLS))
    size = 0
    seq = 0
    for i in range(n0):
        hkey[size] = init_win[i, W_KEY]
        hseq[size] = seq
        for c in range(WIN_COLS):
            hwin[size, c] = init_win[i, c]
        size += 1
        seq += 1
        _sift_up(hkey, hseq, hwin, size - 1)
    peak = size

    wcap = 1024
    wb = np.empty((wcap, WIN_COLS))
    dv = np.empty((64, 2))
    av = np.empty((16, AEV_COLS))
    row = np.empty(WIN_COLS)
    saved = np.empty(N_COUNTERS, np.int64)

    while size > 0:
        for c in range(WIN_COLS):
            row[c] = hwin[0, c]
        size -= 1
        if size > 0:
            hkey[0] = hkey[size]
            hseq[0] = hseq[size]
            for c in range(WIN_COLS):
                hwin[0, c] = hwin[size, c]
            _sift_down(hkey, hseq, hwin, size, 0)
        while True:
            for c in range(N_COUNTERS):
                saved[c] = counters[c]
            nw, nd, na, ok = _propagate_window(
                row, origin, opposite, length, corner_angle, vclass,
                geod_dist, split_comp, split_entryx, eps_win, eps_num,
                fan_full_edges, wb, 0, dv, 0, av, 0, counters)
            if ok:
                break
            for c in range(N_COUNTERS):
                counters[c] = saved[c]
            wcap *= 2
            wb = np.empty((wcap, WIN_COLS))
        counters[C_EV_CREATED] += nd + na
        # the sequential engine applies its events immediately
        for e in range(nd):
            vtx = np.int64(dv[e, 0])
            if dv[e, 1] < geod_dist[vtx]:
                geod_dist[vtx] = dv[e, 1]
                counters[C_EV_APPLIED] += 1
        for e in range(na):
            he = np.int64(av[e, W_HE])
            if av[e, AE_COMP] < split_comp[he]:
                split_comp[he] = av[e, AE_COMP]
                split_entryx[he] = av[e, AE_ENTRYX]
                for c in range(WIN_COLS):
                    split_win[he, c] = av[e, c]
                counters[C_EV_APPLIED] += 1
        if size + nw > cap:
            ncap = cap
            while ncap < size + nw:
                ncap *= 2
            nhkey = np.empty(ncap)
            nhseq = np.empty(ncap, np.int64)
            nhwin = np.empty((ncap, WIN_COLS))
            nhkey[:size] = hkey[:size]
            nhseq[:size] = hseq[:size]
            nhwin[:size] = hwin[:size]
            hkey, hseq, hwin, cap = nhkey, nhseq, nhwin, ncap
        for i in range(nw):
            hkey[size] = wb[i, W_KEY]
            hseq[size] = seq
            for c in range(WIN_COLS):
                hwin[size, c] = wb[i, c]
            size += 1
            seq += 1
            _sift_up(hkey, hseq, hwin, size - 1)
        if size > peak:
            peak = size
    return peak


def run_ich(mesh: SurfaceMesh, sources,
            config: EngineConfig | None = None):
    """Sequential reference engine: pops the globally nearest window from
    a priority queue, propagates it with the same geometry kernel and
    filters, and applies its events immediately.  Serves as the oracle
    and the window-count baseline for the batch engine."""
    config = config or EngineConfig()
    sources = _check_sources(mesh, sources)
    t_start = time.perf_counter()
    dist = np.full(mesh.n_vertices, np.inf)
    dist[sources] = 0.0
    split = AngleSplitTable.empty(mesh.n_half_edges)
    stats = RunStats(algorithm="ich")
    active = _source_rows(mesh, sources, dist, config.epsilon_window, stats)
    stats.windows_stored += len(active)
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    peak = _ich_run(active, mesh.origin, mesh.opposite, mesh.length,
                    mesh.corner_angle, mesh.vertex_class, dist,
                    split.comp, split.entry_x, split.window,
                    config.epsilon_window, EPS_NUM,
                    config.fan_mode == "full_edges", counters)
    stats._absorb_counters(counters)
    stats.events_created = int(counters[C_EV_CREATED])
    stats.events_applied = int(counters[C_EV_APPLIED])
    stats.windows_stored += (stats.total_windows_created
                             - stats.total_windows_pruned)
    stats.peak_active_pool = int(peak)
    stats.iterations = stats.windows_propagated
    stats.time_total = time.perf_counter() - t_start
    stats.time_propagate = stats.time_total
    return dist, stats
