"""Backend equivalence: the numba kernels and the numpy fallbacks must
produce bit-identical results on the same inputs."""

from __future__ import annotations

import random

import numpy as np
import pytest

from oracles import bfs_oracle
from pathlay import _kernels


def _random_case(rng, m):
    segs = rng.integers(0, 30, size=(m, 4)).astype(np.float64)
    keep = (segs[:, 0] != segs[:, 2]) | (segs[:, 1] != segs[:, 3])
    segs = segs[keep]
    ends = rng.integers(0, max(2, len(segs)), size=(len(segs), 2)).astype(np.int64)
    return segs, ends


class TestCrossCountBackends:
    def test_scalar_equals_numpy(self):
        rng = np.random.default_rng(1234)
        for _ in range(50):
            segs, ends = _random_case(rng, rng.integers(1, 40))
            scalar = _kernels.edge_cross_counts_scalar(segs, ends)
            vectorized = _kernels.edge_cross_counts_numpy(segs, ends)
            assert np.array_equal(scalar, vectorized)

    @pytest.mark.skipif(
        _kernels.edge_cross_counts_jit is None, reason="numba backend inactive"
    )
    def test_jit_equals_numpy(self):
        rng = np.random.default_rng(99)
        for _ in range(30):
            segs, ends = _random_case(rng, rng.integers(1, 40))
            jit = _kernels.edge_cross_counts_jit(segs, ends)
            vectorized = _kernels.edge_cross_counts_numpy(segs, ends)
            assert np.array_equal(jit, vectorized)

    def test_empty(self):
        segs = np.zeros((0, 4))
        ends = np.zeros((0, 2), dtype=np.int64)
        assert _kernels.edge_cross_counts_numpy(segs, ends).shape == (0,)


class TestBfsBackends:
    def _random_grid(self, rng):
        nx, ny = rng.randint(1, 20), rng.randint(1, 20)
        blocked = np.zeros((nx, ny), dtype=np.uint8)
        for _ in range(rng.randint(0, nx * ny // 3)):
            blocked[rng.randrange(nx), rng.randrange(ny)] = 1
        free = np.argwhere(blocked == 0)
        if len(free) == 0:
            return None
        si, sj = free[rng.randrange(len(free))]
        return blocked, int(si), int(sj)

    def test_scalar_equals_numpy_and_oracle(self):
        rng = random.Random(5)
        for _ in range(100):
            case = self._random_grid(rng)
            if case is None:
                continue
            blocked, si, sj = case
            scalar = _kernels.grid_bfs_dist_scalar(blocked, si, sj)
            vectorized = _kernels.grid_bfs_dist_numpy(blocked, si, sj)
            oracle = bfs_oracle(blocked, (si, sj))
            assert np.array_equal(scalar, vectorized)
            assert np.array_equal(scalar, oracle)

    @pytest.mark.skipif(
        _kernels.grid_bfs_dist_jit is None, reason="numba backend inactive"
    )
    def test_jit_equals_scalar(self):
        rng = random.Random(6)
        for _ in range(60):
            case = self._random_grid(rng)
            if case is None:
                continue
            blocked, si, sj = case
            jit = _kernels.grid_bfs_dist_jit(blocked, si, sj)
            scalar = _kernels.grid_bfs_dist_scalar(blocked, si, sj)
            assert np.array_equal(jit, scalar)

    def test_blocked_source_unreachable(self):
        blocked = np.ones((3, 3), dtype=np.uint8)
        dist = _kernels.grid_bfs_dist_numpy(blocked, 1, 1)
        assert np.all(dist == -1)
