"""Hot numeric kernels: pairwise crossing counts and virtual-grid BFS.

Two interchangeable backends produce bit-identical results:

* a scalar loop compiled with numba ``@njit`` (default), and
* a vectorized pure-numpy path, selected with ``PATHLAY_NUMBA=0`` or used
  automatically when numba is not importable.

All coordinates are integer-valued (grid units or pixels) stored as
float64, so every orientation sign below is exact.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

_FLAG = os.environ.get("PATHLAY_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "off", "no")

if _WANT_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - environment dependent
        warnings.warn("numba unavailable, falling back to the numpy kernels")
        njit = None
else:
    njit = None


def _edge_cross_counts_impl(segs, ends):
    """Per-edge crossing counts over all non-exempt segment pairs.

    segs: (m, 4) float64 rows (ax, ay, bx, by); ends: (m, 2) int64 node
    indices. Pairs sharing a node index are exempt.
    """
    m = segs.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    for i in range(m):
        ax, ay, bx, by = segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3]
        for j in range(i + 1, m):
            if (
                ends[i, 0] == ends[j, 0]
                or ends[i, 0] == ends[j, 1]
                or ends[i, 1] == ends[j, 0]
                or ends[i, 1] == ends[j, 1]
            ):
                continue
            cx, cy, dx, dy = segs[j, 0], segs[j, 1], segs[j, 2], segs[j, 3]
            if max(ax, bx) < min(cx, dx) or max(cx, dx) < min(ax, bx):
                continue
            if max(ay, by) < min(cy, dy) or max(cy, dy) < min(ay, by):
                continue
            d1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            d2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
            if (d1 > 0 and d2 > 0) or (d1 < 0 and d2 < 0):
                continue
            d3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
            d4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
            if (d3 > 0 and d4 > 0) or (d3 < 0 and d4 < 0):
                continue
            counts[i] += 1
            counts[j] += 1
    return counts


def edge_cross_counts_numpy(segs, ends):
    """Vectorized pairwise crossing counts (broadcasted orientation signs)."""
    m = segs.shape[0]
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    ax, ay, bx, by = segs[:, 0], segs[:, 1], segs[:, 2], segs[:, 3]

    shared = np.zeros((m, m), dtype=bool)
    for a in range(2):
        for b in range(2):
            shared |= ends[:, a, None] == ends[None, :, b]

    no_bbox = (
        (np.maximum(ax, bx)[:, None] < np.minimum(ax, bx)[None, :])
        | (np.maximum(ax, bx)[None, :] < np.minimum(ax, bx)[:, None])
        | (np.maximum(ay, by)[:, None] < np.minimum(ay, by)[None, :])
        | (np.maximum(ay, by)[None, :] < np.minimum(ay, by)[:, None])
    )

    ux, uy = (bx - ax)[:, None], (by - ay)[:, None]
    d1 = ux * (ay[None, :] - ay[:, None]) - uy * (ax[None, :] - ax[:, None])
    d2 = ux * (by[None, :] - ay[:, None]) - uy * (bx[None, :] - ax[:, None])
    straddle_ij = ~(((d1 > 0) & (d2 > 0)) | ((d1 < 0) & (d2 < 0)))

    cross = straddle_ij & straddle_ij.T & ~no_bbox & ~shared
    np.fill_diagonal(cross, False)
    return cross.sum(axis=1).astype(np.int64)


def _grid_bfs_dist_impl(blocked, si, sj):
    """Breadth-first distance field on a 4-connected grid.

    blocked: (nx, ny) uint8 mask; (si, sj) the source cell. Returns an
    int32 field with -1 for unreachable or blocked cells.
    """
    nx, ny = blocked.shape
    dist = np.full((nx, ny), -1, dtype=np.int32)
    if si < 0 or sj < 0 or si >= nx or sj >= ny or blocked[si, sj]:
        return dist
    queue = np.empty(nx * ny, dtype=np.int64)
    head = 0
    tail = 0
    queue[tail] = si * ny + sj
    tail += 1
    dist[si, sj] = 0
    while head < tail:
        code = queue[head]
        head += 1
        i = code // ny
        j = code % ny
        d = dist[i, j] + 1
        if i > 0 and not blocked[i - 1, j] and dist[i - 1, j] < 0:
            dist[i - 1, j] = d
            queue[tail] = (i - 1) * ny + j
            tail += 1
        if i + 1 < nx and not blocked[i + 1, j] and dist[i + 1, j] < 0:
            dist[i + 1, j] = d
            queue[tail] = (i + 1) * ny + j
            tail += 1
        if j > 0 and not blocked[i, j - 1] and dist[i, j - 1] < 0:
            dist[i, j - 1] = d
            queue[tail] = i * ny + j - 1
            tail += 1
        if j + 1 < ny and not blocked[i, j + 1] and dist[i, j + 1] < 0:
            dist[i, j + 1] = d
            queue[tail] = i * ny + j + 1
            tail += 1
    return dist


def grid_bfs_dist_numpy(blocked, si, sj):
    """Wavefront BFS distance field (boolean shift dilation)."""
    nx, ny = blocked.shape
    dist = np.full((nx, ny), -1, dtype=np.int32)
    if si < 0 or sj < 0 or si >= nx or sj >= ny or blocked[si, sj]:
        return dist
    free = ~blocked.astype(bool)
    frontier = np.zeros((nx, ny), dtype=bool)
    frontier[si, sj] = True
    dist[si, sj] = 0
    d = 0
    while frontier.any():
        grown = np.zeros((nx, ny), dtype=bool)
        grown[1:, :] |= frontier[:-1, :]
        grown[:-1, :] |= frontier[1:, :]
        grown[:, 1:] |= frontier[:, :-1]
        grown[:, :-1] |= frontier[:, 1:]
        d += 1
        frontier = grown & free & (dist < 0)
        dist[frontier] = d
    return dist


edge_cross_counts_scalar = _edge_cross_counts_impl
grid_bfs_dist_scalar = _grid_bfs_dist_impl

if njit is not None:
    edge_cross_counts_jit = njit(cache=True)(_edge_cross_counts_impl)
    grid_bfs_dist_jit = njit(cache=True)(_grid_bfs_dist_impl)
    edge_cross_counts = edge_cross_counts_jit
    grid_bfs_dist = grid_bfs_dist_jit
    ACTIVE_BACKEND = "numba"
else:
    edge_cross_counts_jit = None
    grid_bfs_dist_jit = None
    edge_cross_counts = edge_cross_counts_numpy
    grid_bfs_dist = grid_bfs_dist_numpy
    ACTIVE_BACKEND = "numpy"


def warmup() -> None:
    """Trigger JIT compilation so later timings measure steady state."""
    segs = np.array([[0.0, 0.0, 2.0, 2.0], [0.0, 2.0, 2.0, 0.0]])
    ends = np.array([[0, 1], [2, 3]], dtype=np.int64)
    edge_cross_counts(segs, ends)
    blocked = np.zeros((3, 3), dtype=np.uint8)
    grid_bfs_dist(blocked, 0, 0)
