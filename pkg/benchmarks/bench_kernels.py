"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py [--repeats N]

Both backends are imported directly, so results do not depend on the
PATHLAY_NUMBA environment flag. The crossing kernel is timed on random
segment sets at several edge counts, the BFS kernel on square grids with
a third of the cells blocked.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pathlay import _kernels


def _time(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_crossings(repeats: int) -> None:
    print(f"{'edges':>8} {'numba (ms)':>12} {'numpy (ms)':>12} {'speedup':>9}")
    rng = np.random.default_rng(7)
    for m in (32, 64, 128, 256, 512):
        segs = rng.integers(0, 500, size=(m, 4)).astype(np.float64)
        segs[:, 2] += 1  # no degenerate segments
        ends = rng.integers(0, m, size=(m, 2)).astype(np.int64)
        rows = {}
        if _kernels.edge_cross_counts_jit is not None:
            _kernels.edge_cross_counts_jit(segs, ends)  # compile outside timing
            rows["numba"] = _time(_kernels.edge_cross_counts_jit, segs, ends, repeats=repeats)
        rows["numpy"] = _time(_kernels.edge_cross_counts_numpy, segs, ends, repeats=repeats)
        numba_ms = rows.get("numba")
        speedup = f"{rows['numpy'] / numba_ms:9.1f}" if numba_ms else "      n/a"
        numba_txt = f"{numba_ms * 1e3:12.3f}" if numba_ms else "         n/a"
        print(f"{m:>8} {numba_txt} {rows['numpy'] * 1e3:12.3f} {speedup}")


def bench_bfs(repeats: int) -> None:
    print(f"{'grid':>8} {'numba (ms)':>12} {'numpy (ms)':>12} {'speedup':>9}")
    rng = np.random.default_rng(11)
    for side in (32, 64, 128, 256):
        blocked = (rng.random((side, side)) < 0.33).astype(np.uint8)
        blocked[0, :] = 0  # open channel so the flood traverses the grid
        blocked[:, 0] = 0
        rows = {}
        if _kernels.grid_bfs_dist_jit is not None:
            _kernels.grid_bfs_dist_jit(blocked, 0, 0)
            rows["numba"] = _time(_kernels.grid_bfs_dist_jit, blocked, 0, 0, repeats=repeats)
        rows["numpy"] = _time(_kernels.grid_bfs_dist_numpy, blocked, 0, 0, repeats=repeats)
        numba_ms = rows.get("numba")
        speedup = f"{rows['numpy'] / numba_ms:9.1f}" if numba_ms else "      n/a"
        numba_txt = f"{numba_ms * 1e3:12.3f}" if numba_ms else "         n/a"
        print(f"{side}x{side:<4} {numba_txt} {rows['numpy'] * 1e3:12.3f} {speedup}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    if _kernels.edge_cross_counts_jit is None:
        print("note: numba backend unavailable, timing the numpy path only\n")
    print("pairwise crossing counts")
    bench_crossings(args.repeats)
    print("\ngrid BFS distance field")
    bench_bfs(args.repeats)


if __name__ == "__main__":
    main()
