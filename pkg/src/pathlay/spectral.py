"""Graph Laplacian and the eigenvector coordinates derived from it.

The Laplacian L = D - A of the undirected simple graph is symmetric
positive semidefinite and satisfies x'Lx = sum over edges (x_u - x_v)^2,
so the eigenvectors of its two smallest strictly positive eigenvalues
place adjacent nodes close together. Those two eigenvectors become the
per-node (u, v) coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DimensionMismatch
from .model import Graph, undirected_adjacency

POSITIVE_EIGENVALUE_RTOL = 1e-9
RESIDUAL_TOL = 1e-8


class InsufficientRank(Exception):
    """No strictly positive eigenvalue to build coordinates from."""


@dataclass(frozen=True)
class SpectralCoords:
    u: np.ndarray
    v: np.ndarray
    eigenvalues: tuple[float, float]


def build_laplacian(g: Graph) -> np.ndarray:
    """Dense integer Laplacian, node index order = node file order."""
    n = len(g.nodes)
    lap = np.zeros((n, n), dtype=np.int64)
    adj = undirected_adjacency(g)
    for node in g.nodes:
        i = g.index_of(node.id)
        lap[i, i] = len(adj[node.id])
        for other in adj[node.id]:
            lap[i, g.index_of(other)] = -1
    return lap


def quadratic_form(lap: np.ndarray, x: np.ndarray) -> float:
    """x'Lx, which equals the sum of squared differences across edges."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (lap.shape[0],):
        raise DimensionMismatch(
            f"vector of length {lap.shape[0]} required, got shape {x.shape}"
        )
    return float(x @ lap @ x)


def _fix_sign(w: np.ndarray) -> np.ndarray:
    """Flip so the first largest-magnitude component is positive."""
    idx = int(np.argmax(np.abs(w)))
    if w[idx] < 0:
        return -w
    return w


def spectral_coordinates(lap: np.ndarray) -> SpectralCoords:
    """Unit eigenvectors of the two smallest positive eigenvalues.

    With exactly one positive eigenvalue (a 2-node graph) the second
    coordinate falls back to all zeros. With none on a multi-node graph
    (edgeless or disconnected kernels) InsufficientRank is raised; the
    pipeline lays such graphs out per connected component instead.
    """
    n = lap.shape[0]
    if n == 1:
        return SpectralCoords(np.zeros(1), np.zeros(1), (0.0, 0.0))
    values, vectors = np.linalg.eigh(np.asarray(lap, dtype=np.float64))
    threshold = POSITIVE_EIGENVALUE_RTOL * max(float(values[-1]), 0.0)
    positive = [i for i, lam in enumerate(values) if lam > threshold]
    if not positive:
        raise InsufficientRank("no strictly positive Laplacian eigenvalue")
    first = positive[0]
    u = _fix_sign(vectors[:, first].copy())
    if len(positive) >= 2:
        second = positive[1]
        v = _fix_sign(vectors[:, second].copy())
        pair = (float(values[first]), float(values[second]))
    else:
        v = np.zeros(n)
        pair = (float(values[first]), 0.0)
    for lam, w in ((pair[0], u), (pair[1], v)):
        if lam == 0.0:
            continue
        residual = np.max(np.abs(lap @ w - lam * w))
        if residual > RESIDUAL_TOL * max(1.0, lam):
            raise ArithmeticError(f"eigenpair residual {residual} out of tolerance")
    return SpectralCoords(u, v, pair)
