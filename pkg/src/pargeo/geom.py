"""Window geometry kernel: unfolding, propagation, filters, saddle fans.

A *window* is an interval on an oriented half-edge ``e = (v0, v1)`` that
encodes all candidate shortest paths crossing it through one unfolded face
strip.  It is the 6-tuple ``(half_edge, b0, b1, d0, d1, d)``: interval
endpoints ``A``/``B`` as arc-length positions ``b0 < b1`` along ``e``,
distances ``d0``/``d1`` from ``A``/``B`` back to the pseudo source, and the
pseudo source's own distance ``d`` to the true source.

Frame convention: the window's own half-edge belongs to the triangle on
the pseudo-source side, so in the local frame (``v0`` at the origin,
``v1`` at ``(length, 0)``) the unfolded pseudo source has ``y >= 0`` and
propagation unfolds the *opposite* triangle into ``y < 0``.  Children are
attached to half-edges of the triangle just crossed, which preserves the
convention.

All hot-path functions are numba kernels operating on flat arrays; the
dataclass wrappers at the bottom exist for tests and direct use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .mesh import SurfaceMesh, VertexClass, next_half_edge, prev_half_edge

EPS_WINDOW = 1e-6  # intervals not longer than this are dropped
EPS_NUM = 1e-12  # geometric predicate tolerance

# window row layout
W_HE, W_B0, W_B1, W_D0, W_D1, W_D, W_KEY = 0, 1, 2, 3, 4, 5, 6
WIN_COLS = 7

# angle event row: window row columns, then cached comparison values
AE_COMP, AE_ENTRYX = 7, 8
AEV_COLS = 9

# per-worker counter layout
C_PROPAGATED = 0
C_CREATED = 1  # candidate windows, including filtered ones
C_PRUNE_ICH = 2
C_PRUNE_SPLIT = 3  # children forgone by the one-angle-one-split rule
C_PRUNE_TINY = 4
C_PRUNE_DEGEN = 5
C_MAXCHILD = 6
C_EV_CREATED = 7
C_EV_APPLIED = 8
N_COUNTERS = 9

_SADDLE = int(VertexClass.SADDLE)
_TWO_PI = 2.0 * math.pi
_MAXVAL = 256  # fan walk guard (max vertex valence)


class InvalidWindow(ValueError):
    """Raised when a window admits no planar pseudo source."""


@njit(cache=True)
def _next_he(j):
    return 3 * (j // 3) + (j + 1) % 3


@njit(cache=True)
def _prev_he(j):
    return 3 * (j // 3) + (j + 2) % 3


@njit(cache=True)
def _unfold(b0, b1, d0, d1, eps_num):
    """Pseudo-source position (x, y >= 0) in the window frame.

    Returns (x, y, ok); ok is False when the interval is empty or the
    circle intersection discriminant is negative beyond tolerance.
    """
    w = b1 - b0
    if w <= 0.0:
        return 0.0, 0.0, False
    x = b0 + 0.5 * (w * w + d0 * d0 - d1 * d1) / w
    dx = x - b0
    h2 = d0 * d0 - dx * dx
    scale = d0 * d0 if d0 * d0 > w * w else w * w
    if h2 < -eps_num * max(scale, 1e-30):
        return x, 0.0, False
    y = math.sqrt(h2) if h2 > 0.0 else 0.0
    return x, y, True


@njit(cache=True)
def _window_key(b0, b1, d0, d1, dps, eps_num):
    """Shortest source distance through the interval: d plus the distance
    from the pseudo source to the closest point of [A, B].  Negative when
    the window is degenerate."""
    x, y, ok = _unfold(b0, b1, d0, d1, eps_num)
    if not ok:
        return -1.0
    if x < b0 or x > b1:
        return dps + (d0 if d0 < d1 else d1)
    return dps + y


@njit(cache=True)
def _ray_seg_param(ix, iy, tx, ty, px, py, qx, qy):
    """Parameter s in [0, 1] where the ray from I through T meets segment
    P->Q, clamped; ok is False for a parallel (degenerate) ray."""
    rx = tx - ix
    ry = ty - iy
    ex = qx - px
    ey = qy - py
    den = rx * ey - ry * ex
    if abs(den) < 1e-300:
        return 0.0, False
    s = ((px - ix) * ry - (py - iy) * rx) / den
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return s, True


@njit(cache=True)
def _emit_child(che, lc, sx, sy, ex, ey, s0, s1, ix, iy, dps,
                g_s, g_e, g_r, rx, ry, r_pairs_low,
                eps_win, eps_num, out_win, nw, counters):
    """Clip, filter and store one candidate child window.

    The child lies on half-edge ``che`` running from frame point S to E
    (arc positions ``s0*lc`` to ``s1*lc``).  ``g_s``/``g_e`` are current
    distances at the S/E vertices, ``g_r`` at the remaining triangle
    vertex (position ``rx, ry``), paired with the low interval endpoint
    when ``r_pairs_low``.  Returns (nw, stored) with nw == -1 on buffer
    overflow.
    """
    counters[C_CREATED] += 1
    cb0 = s0 * lc
    cb1 = s1 * lc
    if cb1 - cb0 <= eps_win:
        counters[C_PRUNE_TINY] += 1
        return nw, 0
    p0x = sx + s0 * (ex - sx)
    p0y = sy + s0 * (ey - sy)
    p1x = sx + s1 * (ex - sx)
    p1y = sy + s1 * (ey - sy)
    cd0 = math.hypot(ix - p0x, iy - p0y)
    cd1 = math.hypot(ix - p1x, iy - p1y)
    through0 = dps + cd0
    through1 = dps + cd1
    # three-inequality filter: a window is useless when going through a
    # triangle vertex already beats it at the paired interval endpoint
    if g_s < np.inf and through1 > g_s + math.hypot(sx - p1x, sy - p1y) + eps_num:
        counters[C_PRUNE_ICH] += 1
        return nw, 0
    if g_e < np.inf and through0 > g_e + math.hypot(ex - p0x, ey - p0y) + eps_num:
        counters[C_PRUNE_ICH] += 1
        return nw, 0
    if g_r < np.inf:
        if r_pairs_low:
            if through0 > g_r + math.hypot(rx - p0x, ry - p0y) + eps_num:
                counters[C_PRUNE_ICH] += 1
                return nw, 0
        else:
            if through1 > g_r + math.hypot(rx - p1x, ry - p1y) + eps_num:
                counters[C_PRUNE_ICH] += 1
                return nw, 0
    key = _window_key(cb0, cb1, cd0, cd1, dps, eps_num)
    if key < 0.0:
        counters[C_PRUNE_DEGEN] += 1
        return nw, 0
    if nw >= out_win.shape[0]:
        return -1, 0
    out_win[nw, W_HE] = che
    out_win[nw, W_B0] = cb0
    out_win[nw, W_B1] = cb1
    out_win[nw, W_D0] = cd0
    out_win[nw, W_D1] = cd1
    out_win[nw, W_D] = dps
    out_win[nw, W_KEY] = key
    return nw + 1, 1


@njit(cache=True)
def _emit_fan(v, dist_v, h_anchor, rel_r, full_fan,
              origin, opposite, length, corner_angle, geod_dist,
              eps_win, eps_num, fan_full_edges, out_win, nw, counters):
    """Windows sourced at ``v`` on the edges opposite it.

    Faces around ``v`` are unfolded cumulatively counterclockwise; a
    direction is an angle in that coordinate.  ``rel_r`` is the reverse
    incoming-ray direction measured from ``h_anchor``'s direction; the fan
    spans ``rel_r + pi`` to ``rel_r + total_angle - pi`` (the two straight
    extensions of the incoming ray around each side of ``v``).  With
    ``full_fan`` every incident opposite edge gets a full window, which is
    how source windows are created.  Returns (nw, stored); nw == -1 on
    buffer overflow.
    """
    # walk clockwise to the fan start: the boundary-most outgoing
    # half-edge, or all the way around for an interior vertex
    start = h_anchor
    interior = False
    guard = 0
    while guard < 4 * _MAXVAL:
        ho = opposite[start]
        if ho < 0:
            break
        hcw = 3 * (ho // 3) + (ho + 1) % 3
        if hcw == h_anchor:
            interior = True
            start = h_anchor
            break
        start = hcw
        guard += 1

    hs = np.empty(_MAXVAL, np.int64)
    phis = np.empty(_MAXVAL + 1, np.float64)
    m = 0
    phi = 0.0
    anchor_phi = 0.0
    h = start
    while m < _MAXVAL:
        hs[m] = h
        phis[m] = phi
        if h == h_anchor:
            anchor_phi = phi
        phi += corner_angle[h]
        m += 1
        p = 3 * (h // 3) + (h + 2) % 3
        ho = opposite[p]
        if ho < 0:
            break
        h = ho
        if h == start:
            break
    phis[m] = phi
    theta = phi

    if full_fan:
        flo = -1.0e300
        fhi = 1.0e300
        reps = 1
    else:
        width = theta - _TWO_PI
        if width <= eps_num:
            return nw, 0
        r_abs = anchor_phi + rel_r
        flo = r_abs + math.pi
        fhi = flo + width
        if interior:
            k = math.floor(flo / theta)
            flo -= k * theta
            fhi -= k * theta
            reps = 2
        else:
            reps = 1

    stored = 0
    for i in range(m):
        wlo = phis[i]
        whi = phis[i + 1]
        hgi = hs[i]
        che = 3 * (hgi // 3) + (hgi + 1) % 3
        hprev = 3 * (hgi // 3) + (hgi + 2) % 3
        li = length[hgi]
        lq = length[hprev]
        lc = length[che]
        pid = origin[che]
        qid = origin[hprev]
        for rep in range(reps):
            lo = flo - rep * theta
            hi = fhi - rep * theta
            slo = wlo if wlo > lo else lo
            shi = whi if whi < hi else hi
            if shi - slo <= 1e-12:
                continue
            if fan_full_edges:
                slo = wlo
                shi = whi
            px = li * math.cos(wlo)
            py = li * math.sin(wlo)
            qx = lq * math.cos(whi)
            qy = lq * math.sin(whi)
            if slo <= wlo + 1e-12:
                s0 = 0.0
                ok0 = True
            else:
                s0, ok0 = _ray_seg_param(0.0, 0.0, math.cos(slo),
                                         math.sin(slo), px, py, qx, qy)
            if shi >= whi - 1e-12:
                s1 = 1.0
                ok1 = True
            else:
                s1, ok1 = _ray_seg_param(0.0, 0.0, math.cos(shi),
                                         math.sin(shi), px, py, qx, qy)
            if not (ok0 and ok1):
                counters[C_CREATED] += 1
                counters[C_PRUNE_DEGEN] += 1
                continue
            nw, add = _emit_child(che, lc, px, py, qx, qy, s0, s1,
                                  0.0, 0.0, dist_v,
                                  geod_dist[pid], geod_dist[qid],
                                  np.inf, 0.0, 0.0, True,
                                  eps_win, eps_num, out_win, nw, counters)
            if nw < 0:
                return -1, stored
            stored += add
    return nw, stored


@njit(cache=True)
def _propagate_window(row, origin, opposite, length, corner_angle, vclass,
                      geod_dist, split_comp, split_entryx,
                      eps_win, eps_num, fan_full_edges,
                      out_win, nw, out_dev, nd, out_aev, na, counters):
    """One window propagation step.

    Reads the distance field and angle-split table, writes candidate
    children and fan windows to ``out_win`` and deferred update events to
    ``out_dev``/``out_aev``.  Returns (nw, nd, na, ok); ok is False on
    buffer overflow, in which case the caller re-runs with more room.
    """
    counters[C_PROPAGATED] += 1
    j = np.int64(row[W_HE])
    b0 = row[W_B0]
    b1 = row[W_B1]
    d0 = row[W_D0]
    d1 = row[W_D1]
    dps = row[W_D]
    ell = length[j]
    ix, iy, ok = _unfold(b0, b1, d0, d1, eps_num)
    if not ok:
        counters[C_PRUNE_DEGEN] += 1
        return nw, nd, na, True
    stored = 0
    jn = 3 * (j // 3) + (j + 1) % 3
    jp = 3 * (j // 3) + (j + 2) % 3
    v0 = origin[j]
    v1 = origin[jn]

    # interval endpoint sitting on v0: candidate vertex distance (and a
    # fan continuation when v0 is a saddle).  The candidate bends at A,
    # so it is a valid path length even when A is only within tolerance
    # of the vertex, and equals d0 + d at exact coincidence.
    if b0 <= eps_win:
        cand = dps + d0 + b0
        if cand < geod_dist[v0]:
            if nd >= out_dev.shape[0]:
                return nw, nd, na, False
            out_dev[nd, 0] = v0
            out_dev[nd, 1] = cand
            nd += 1
            if vclass[v0] == _SADDLE:
                rel = math.atan2(iy, ix)
                nw, add = _emit_fan(v0, cand, j, rel, False,
                                    origin, opposite, length, corner_angle,
                                    geod_dist, eps_win, eps_num,
                                    fan_full_edges, out_win, nw, counters)
                if nw < 0:
                    return nw, nd, na, False
                stored += add
    if b1 >= ell - eps_win:
        cand = dps + d1 + (ell - b1)
        if cand < geod_dist[v1]:
            if nd >= out_dev.shape[0]:
                return nw, nd, na, False
            out_dev[nd, 0] = v1
            out_dev[nd, 1] = cand
            nd += 1
            if vclass[v1] == _SADDLE:
                # anchor at the outgoing half-edge v1 -> source-side apex
                lps = length[jp]
                lns = length[jn]
                axs = 0.5 * (ell * ell + lps * lps - lns * lns) / ell
                ay2 = lps * lps - axs * axs
                ays = math.sqrt(ay2) if ay2 > 0.0 else 0.0
                adir = math.atan2(ays, axs - ell)
                rel = math.atan2(iy, ix - ell) - adir
                nw, add = _emit_fan(v1, cand, jn, rel, False,
                                    origin, opposite, length, corner_angle,
                                    geod_dist, eps_win, eps_num,
                                    fan_full_edges, out_win, nw, counters)
                if nw < 0:
                    return nw, nd, na, False
                stored += add

    jo = opposite[j]
    if jo >= 0:
        # unfold the far triangle: apex D below the edge
        jno = 3 * (jo // 3) + (jo + 1) % 3
        jpo = 3 * (jo // 3) + (jo + 2) % 3
        lan = length[jno]  # |v0 - D|
        lpv = length[jpo]  # |D - v1|
        dx = 0.5 * (ell * ell + lan * lan - lpv * lpv) / ell
        dy2 = lan * lan - dx * dx
        dy = -math.sqrt(dy2) if dy2 > 0.0 else 0.0
        vd = origin[jpo]

        uax = b0 - ix
        uay = -iy
        ubx = b1 - ix
        uby = -iy
        vdx = dx - ix
        vdy = dy - iy
        nvd = math.hypot(vdx, vdy)
        ca = uax * vdy - uay * vdx
        cb = ubx * vdy - uby * vdx
        tola = eps_num * math.hypot(uax, uay) * nvd
        tolb = eps_num * math.hypot(ubx, uby) * nvd

        g0 = geod_dist[v0]
        g1 = geod_dist[v1]
        gd = geod_dist[vd]

        if ca > tola and cb < -tolb:
            # the ray to the apex passes strictly inside (A, B)
            comp = dps + nvd
            denom = iy - dy
            entry_x = ix + (dx - ix) * (iy / denom) if denom > 1e-300 else ix
            want_left = True
            want_right = True
            if comp < split_comp[j]:
                if na >= out_aev.shape[0]:
                    return nw, nd, na, False
                for c in range(WIN_COLS):
                    out_aev[na, c] = row[c]
                out_aev[na, AE_COMP] = comp
                out_aev[na, AE_ENTRYX] = entry_x
                na += 1
            else:
                # a stored window already gives the apex a shorter
                # distance: keep only the child on our side of its entry
                counters[C_PRUNE_SPLIT] += 1
                counters[C_CREATED] += 1
                if entry_x < split_entryx[j]:
                    want_right = False
                else:
                    want_left = False
            if want_left:
                sa, oka = _ray_seg_param(ix, iy, b0, 0.0, 0.0, 0.0, dx, dy)
                if oka:
                    nw, add = _emit_child(jno, lan, 0.0, 0.0, dx, dy,
                                          sa, 1.0, ix, iy, dps,
                                          g0, gd, g1, ell, 0.0, True,
                                          eps_win, eps_num,
                                          out_win, nw, counters)
                    if nw < 0:
                        return nw, nd, na, False
                    stored += add
                else:
                    counters[C_CREATED] += 1
                    counters[C_PRUNE_DEGEN] += 1
            if want_right:
                sb, okb = _ray_seg_param(ix, iy, b1, 0.0, dx, dy, ell, 0.0)
                if okb:
                    nw, add = _emit_child(jpo, lpv, dx, dy, ell, 0.0,
                                          0.0, sb, ix, iy, dps,
                                          gd, g1, g0, 0.0, 0.0, False,
                                          eps_win, eps_num,
                                          out_win, nw, counters)
                    if nw < 0:
                        return nw, nd, na, False
                    stored += add
                else:
                    counters[C_CREATED] += 1
                    counters[C_PRUNE_DEGEN] += 1
            cand = dps + nvd
            if cand < gd:
                if nd >= out_dev.shape[0]:
                    return nw, nd, na, False
                out_dev[nd, 0] = vd
                out_dev[nd, 1] = cand
                nd += 1
                if vclass[vd] == _SADDLE:
                    gamma = math.atan2(-dy, ell - dx)
                    rel = math.atan2(iy - dy, ix - dx) - gamma
                    nw, add = _emit_fan(vd, cand, jpo, rel, False,
                                        origin, opposite, length,
                                        corner_angle, geod_dist,
                                        eps_win, eps_num, fan_full_edges,
                                        out_win, nw, counters)
                    if nw < 0:
                        return nw, nd, na, False
                    stored += add
        else:
            # both boundary rays exit through the same far edge
            if cb >= -tolb:
                sa, oka = _ray_seg_param(ix, iy, b0, 0.0, 0.0, 0.0, dx, dy)
                sb, okb = _ray_seg_param(ix, iy, b1, 0.0, 0.0, 0.0, dx, dy)
                if oka and okb:
                    nw, add = _emit_child(jno, lan, 0.0, 0.0, dx, dy,
                                          sa, sb, ix, iy, dps,
                                          g0, gd, g1, ell, 0.0, True,
                                          eps_win, eps_num,
                                          out_win, nw, counters)
                    if nw < 0:
                        return nw, nd, na, False
                    stored += add
                else:
                    counters[C_CREATED] += 1
                    counters[C_PRUNE_DEGEN] += 1
            else:
                sa, oka = _ray_seg_param(ix, iy, b0, 0.0, dx, dy, ell, 0.0)
                sb, okb = _ray_seg_param(ix, iy, b1, 0.0, dx, dy, ell, 0.0)
                if oka and okb:
                    nw, add = _emit_child(jpo, lpv, dx, dy, ell, 0.0,
                                          sa, sb, ix, iy, dps,
                                          gd, g1, g0, 0.0, 0.0, False,
                                          eps_win, eps_num,
                                          out_win, nw, counters)
                    if nw < 0:
                        return nw, nd, na, False
                    stored += add
                else:
                    counters[C_CREATED] += 1
                    counters[C_PRUNE_DEGEN] += 1

    if stored > counters[C_MAXCHILD]:
        counters[C_MAXCHILD] = stored
    return nw, nd, na, True


@njit(cache=True)
def _create_source_windows(s, h_anchor, origin, opposite, length,
                           corner_angle, geod_dist, eps_win, eps_num,
                           out_win, nw, counters):
    return _emit_fan(s, 0.0, h_anchor, 0.0, True,
                     origin, opposite, length, corner_angle, geod_dist,
                     eps_win, eps_num, False, out_win, nw, counters)


# ---------------------------------------------------------------------------
# dataclass wrappers for tests and direct use


@dataclass(frozen=True)
class Window:
    """Interval window on an oriented half-edge."""

    half_edge: int
    b0: float
    b1: float
    d0: float
    d1: float
    d: float

    def to_row(self) -> np.ndarray:
        row = np.empty(WIN_COLS)
        row[W_HE] = self.half_edge
        row[W_B0] = self.b0
        row[W_B1] = self.b1
        row[W_D0] = self.d0
        row[W_D1] = self.d1
        row[W_D] = self.d
        row[W_KEY] = _window_key(self.b0, self.b1, self.d0, self.d1,
                                 self.d, EPS_NUM)
        return row

    @staticmethod
    def from_row(row) -> "Window":
        return Window(int(row[W_HE]), float(row[W_B0]), float(row[W_B1]),
                      float(row[W_D0]), float(row[W_D1]), float(row[W_D]))


@dataclass(frozen=True)
class UpdateEvent:
    """Deferred update: a vertex distance or an angle-split claim.

    ``value`` is the candidate distance for ``kind == "distance"`` and a
    ``(Window, window_key)`` pair for ``kind == "angle_split"``.
    """

    kind: str
    key: int
    value: object


def unfold_pseudo_source(b0, b1, d0, d1, eps_num=EPS_NUM):
    """Planar pseudo-source position for an interval, as (x, y >= 0).

    Raises InvalidWindow when no planar source exists (discriminant
    negative beyond tolerance).
    """
    x, y, ok = _unfold(float(b0), float(b1), float(d0), float(d1), eps_num)
    if not ok:
        raise InvalidWindow(
            f"no planar pseudo source for b0={b0}, b1={b1}, d0={d0}, d1={d1}")
    return x, y


def window_key(w: Window, eps_num=EPS_NUM) -> float:
    """Shortest distance from the source to the window's interval."""
    key = _window_key(w.b0, w.b1, w.d0, w.d1, w.d, eps_num)
    if key < 0.0:
        raise InvalidWindow(f"degenerate window {w}")
    return key


def ich_prune(d, source_pt, a_pt, b_pt, v0_pt, v1_pt, v2_pt,
              g0, g1, g2, eps_num=EPS_NUM) -> bool:
    """Keep/discard decision for a candidate window, all points unfolded
    into one plane.

    The window sits on edge (v0, v1) with interval endpoints A (nearer
    v0) and B, pseudo source I at ``source_pt`` and source distance
    ``d``; ``v2`` is the third vertex of the triangle the window was
    propagated across.  Returns False (discard) when any of

        d+|IB| > g0+|v0B|,  d+|IA| > g1+|v1A|,  d+|IB| > g2+|v2B|

    holds beyond tolerance; the g values may be stale upper bounds.
    """
    ix, iy = source_pt
    ax, ay = a_pt
    bx, by = b_pt
    dia = d + math.hypot(ix - ax, iy - ay)
    dib = d + math.hypot(ix - bx, iy - by)
    checks = ((g0, v0_pt, bx, by, dib),
              (g1, v1_pt, ax, ay, dia),
              (g2, v2_pt, bx, by, dib))
    for g, vpt, ex, ey, through in checks:
        if g < np.inf and through > g + math.hypot(vpt[0] - ex,
                                                   vpt[1] - ey) + eps_num:
            return False
    return True


def _scratch(n_win=4096, n_dev=64, n_aev=16):
    return (np.empty((n_win, WIN_COLS)), np.empty((n_dev, 2)),
            np.empty((n_aev, AEV_COLS)), np.zeros(N_COUNTERS, np.int64))


def propagate_window(w: Window, mesh: SurfaceMesh, dist, split,
                     out_windows: list, out_events: list,
                     eps_window=EPS_WINDOW, fan_full_edges=False) -> None:
    """Propagate one window, appending children to ``out_windows`` and
    deferred events to ``out_events``.  ``dist`` and ``split`` are only
    read; stale values merely weaken the filters."""
    buf, dev, aev, counters = _scratch()
    nw, nd, na, ok = _propagate_window(
        w.to_row(), mesh.origin, mesh.opposite, mesh.length,
        mesh.corner_angle, mesh.vertex_class, dist,
        split.comp, split.entry_x, eps_window, EPS_NUM, fan_full_edges,
        buf, 0, dev, 0, aev, 0, counters)
    if not ok:
        raise RuntimeError("scratch buffer overflow")
    for i in range(nw):
        out_windows.append(Window.from_row(buf[i]))
    for i in range(nd):
        out_events.append(UpdateEvent("distance", int(dev[i, 0]),
                                      float(dev[i, 1])))
    for i in range(na):
        out_events.append(UpdateEvent(
            "angle_split", int(aev[i, W_HE]),
            (Window.from_row(aev[i]), float(aev[i, W_KEY]))))


def create_source_windows(s: int, mesh: SurfaceMesh, out: list) -> None:
    """One full-interval window on the edge opposite ``s`` in every
    incident triangle, with d = 0 and d0/d1 the incident edge lengths."""
    h = int(mesh.outgoing[s])
    if h < 0:
        return
    buf, _, _, counters = _scratch()
    dist = np.full(mesh.n_vertices, np.inf)
    nw, _ = _create_source_windows(
        s, h, mesh.origin, mesh.opposite, mesh.length, mesh.corner_angle,
        dist, EPS_WINDOW, EPS_NUM, buf, 0, counters)
    if nw < 0:
        raise RuntimeError("scratch buffer overflow")
    for i in range(nw):
        out.append(Window.from_row(buf[i]))


def create_fan_windows(v: int, dist_v: float, anchor_half_edge: int,
                       reverse_dir_angle: float, mesh: SurfaceMesh, dist,
                       out: list, full_fan=False, eps_window=EPS_WINDOW,
                       fan_full_edges=False) -> None:
    """Windows sourced at ``v`` over the fan spanned by the two straight
    extensions of the incoming ray.

    ``reverse_dir_angle`` is the direction from ``v`` back toward the
    incoming pseudo source, measured counterclockwise from the direction
    of ``anchor_half_edge`` (an outgoing half-edge of ``v``); the fan's
    bounding directions are that angle plus/minus pi in the cumulative
    unfolding.  ``full_fan`` spans everything, which reproduces source
    initialization.
    """
    buf, _, _, counters = _scratch()
    nw, _ = _emit_fan(v, dist_v, anchor_half_edge, reverse_dir_angle,
                      full_fan, mesh.origin, mesh.opposite, mesh.length,
                      mesh.corner_angle, dist, eps_window, EPS_NUM,
                      fan_full_edges, buf, 0, counters)
    if nw < 0:
        raise RuntimeError("scratch buffer overflow")
    for i in range(nw):
        out.append(Window.from_row(buf[i]))
