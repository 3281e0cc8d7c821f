from __future__ import annotations

import math
import random

import numpy as np
import pytest

from conftest import load_sample, sample_names
from corpus import graph_from, random_connected_graph, random_graph
from oracles import component_count, jacobi_eigh
from pathlay.geometry import DimensionMismatch
from pathlay.model import NodeId, undirected_edge_pairs
from pathlay.spectral import (
    InsufficientRank,
    build_laplacian,
    quadratic_form,
    spectral_coordinates,
)

SQ2 = math.sqrt(2)
SQ6 = math.sqrt(6)


class TestLaplacian:
    def test_path3(self):
        g = graph_from(3, [(1, 2), (2, 3)])
        expected = [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]
        assert build_laplacian(g).tolist() == expected

    def test_single_node(self):
        assert build_laplacian(graph_from(1, [])).tolist() == [[0]]

    def test_triangle(self):
        g = graph_from(3, [(1, 2), (2, 3), (3, 1)])
        expected = [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
        assert build_laplacian(g).tolist() == expected

    def test_rows_sum_to_zero_and_symmetric(self):
        for seed in range(25):
            lap = build_laplacian(random_graph(seed))
            assert np.all(lap.sum(axis=1) == 0)
            assert np.array_equal(lap, lap.T)


class TestQuadraticForm:
    def test_path3_hand_value(self):
        lap = build_laplacian(graph_from(3, [(1, 2), (2, 3)]))
        assert quadratic_form(lap, np.array([1.0, 2.0, 4.0])) == pytest.approx(5.0)

    def test_constant_vector_in_kernel(self):
        lap = build_laplacian(random_graph(11))
        n = lap.shape[0]
        assert quadratic_form(lap, np.full(n, 3.7)) == pytest.approx(0.0, abs=1e-9)

    def test_triangle_hand_value(self):
        lap = build_laplacian(graph_from(3, [(1, 2), (2, 3), (3, 1)]))
        assert quadratic_form(lap, np.array([0.0, 1.0, 2.0])) == pytest.approx(6.0)

    def test_dimension_mismatch(self):
        lap = build_laplacian(graph_from(2, [(1, 2)]))
        with pytest.raises(DimensionMismatch):
            quadratic_form(lap, np.zeros(3))

    def test_psd_and_edge_sum_identity(self):
        rng = random.Random(99)
        for seed in range(20):
            g = random_graph(seed)
            lap = build_laplacian(g)
            n = lap.shape[0]
            pairs = [
                (g.index_of(u), g.index_of(v)) for u, v in undirected_edge_pairs(g)
            ]
            for _ in range(50):
                x = np.array([rng.uniform(-10, 10) for _ in range(n)])
                value = quadratic_form(lap, x)
                assert value >= -1e-9
                direct = sum((x[i] - x[j]) ** 2 for i, j in pairs)
                assert abs(value - direct) <= 1e-9 * (1 + abs(value))


class TestSpectralCoordinates:
    def test_path3_eigenvectors(self):
        lap = build_laplacian(graph_from(3, [(1, 2), (2, 3)]))
        sc = spectral_coordinates(lap)
        assert sc.eigenvalues == pytest.approx((1.0, 3.0), abs=1e-9)
        # sign convention: first largest-magnitude component positive
        assert sc.u == pytest.approx([1 / SQ2, 0.0, -1 / SQ2], abs=1e-9)
        assert sc.v == pytest.approx([-1 / SQ6, 2 / SQ6, -1 / SQ6], abs=1e-9)

    def test_single_edge_fallback(self):
        lap = build_laplacian(graph_from(2, [(1, 2)]))
        sc = spectral_coordinates(lap)
        assert sc.eigenvalues[0] == pytest.approx(2.0)
        assert np.all(sc.v == 0)

    def test_two_isolated_nodes(self):
        lap = build_laplacian(graph_from(2, []))
        with pytest.raises(InsufficientRank):
            spectral_coordinates(lap)

    def test_single_node_trivial(self):
        sc = spectral_coordinates(build_laplacian(graph_from(1, [])))
        assert sc.u.tolist() == [0.0] and sc.v.tolist() == [0.0]

    def test_rayleigh_consistency(self):
        for seed in range(20):
            g = random_connected_graph(seed)
            lap = build_laplacian(g)
            sc = spectral_coordinates(lap)
            for lam, w in zip(sc.eigenvalues, (sc.u, sc.v)):
                if lam == 0.0:
                    continue
                assert abs(quadratic_form(lap, w) - lam) <= 1e-7

    def test_matches_jacobi_oracle_small(self):
        for seed in range(30):
            g = random_graph(seed, n_lo=1, n_hi=12)
            lap = build_laplacian(g)
            oracle_vals, _ = jacobi_eigh(lap)
            impl_vals = np.linalg.eigvalsh(lap.astype(np.float64))
            assert np.max(np.abs(np.sort(oracle_vals) - np.sort(impl_vals))) <= 1e-7

    def test_kernel_dimension_matches_components(self):
        for seed in range(60):
            g = random_graph(seed)
            lap = build_laplacian(g)
            n = lap.shape[0]
            values = np.linalg.eigvalsh(lap.astype(np.float64))
            threshold = 1e-9 * max(float(values[-1]), 1.0)
            kernel = int(np.sum(values <= threshold))
            pairs = [
                (g.index_of(u), g.index_of(v)) for u, v in undirected_edge_pairs(g)
            ]
            assert kernel == component_count(n, pairs)


def test_bundled_samples_match_oracle():
    for name in sample_names():
        g = load_sample(name)
        lap = build_laplacian(g)
        if lap.shape[0] > 12:
            continue
        oracle_vals, oracle_vecs = jacobi_eigh(lap)
        impl_vals = np.linalg.eigvalsh(lap.astype(np.float64))
        assert np.max(np.abs(oracle_vals - impl_vals)) <= 1e-7
        for k, lam in enumerate(oracle_vals):
            w = oracle_vecs[:, k]
            assert np.max(np.abs(lap @ w - lam * w)) <= 1e-7 * max(1.0, lam)
