"""Seeded random graph generators used across the suite."""

from __future__ import annotations

import random

from pathlay.model import Edge, Graph, Node, NodeId, Shape, build_graph


def graph_from(n: int, directed_pairs) -> Graph:
    """Graph with nodes 1..n and default styling."""
    nodes = [
        Node(NodeId(str(i)), Shape.RECTANGLE, f"node {i}", "white", "black")
        for i in range(1, n + 1)
    ]
    edges = [Edge(NodeId(str(a)), NodeId(str(b))) for a, b in directed_pairs]
    return build_graph(nodes, edges)


def random_connected_dag(
    seed: int, n_lo: int = 15, n_hi: int = 40, density: float = 1.6
) -> Graph:
    """Connected DAG: random spanning tree along a random topological
    order plus extra forward edges up to density * n."""
    rng = random.Random(seed)
    n = rng.randint(n_lo, n_hi)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    pairs = set()
    for i in range(1, n):
        parent = order[rng.randrange(i)]
        pairs.add((parent, order[i]))
    target = rng.randint(n - 1, int(density * n))
    attempts = 0
    while len(pairs) < target and attempts < 20 * n:
        attempts += 1
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        if i > j:
            i, j = j, i
        pairs.add((order[i], order[j]))
    return graph_from(n, sorted(pairs))


def random_connected_graph(seed: int, n_lo: int = 2, n_hi: int = 30) -> Graph:
    """Connected graph (cycles allowed): random tree plus chords."""
    rng = random.Random(seed)
    n = rng.randint(n_lo, n_hi)
    pairs = set()
    for v in range(2, n + 1):
        pairs.add((rng.randint(1, v - 1), v))
    extra = rng.randint(0, n)
    attempts = 0
    while attempts < 10 * (extra + 1) and len(pairs) < (n - 1) + extra:
        attempts += 1
        a, b = rng.randint(1, n), rng.randint(1, n)
        if a != b and (b, a) not in pairs:
            pairs.add((a, b))
    return graph_from(n, sorted(pairs))


def random_graph(seed: int, n_lo: int = 1, n_hi: int = 20) -> Graph:
    """Arbitrary graph, possibly disconnected or cyclic."""
    rng = random.Random(seed)
    n = rng.randint(n_lo, n_hi)
    pairs = set()
    m = rng.randint(0, 2 * n)
    for _ in range(m):
        a, b = rng.randint(1, n), rng.randint(1, n)
        if a != b and (b, a) not in pairs:
            pairs.add((a, b))
    return graph_from(n, sorted(pairs))
