"""Depth assignment via DFS from a virtual root, and rank normalization.

The x axis becomes causal order: a virtual root adjacent to every real
node anchors a depth-first search whose back edges are dropped, then
depths are longest paths over the retained edges, so depth(v) >=
depth(u) + 1 holds for every retained edge u -> v. Both axes are then
densified to consecutive integer ranks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Graph, NodeId

_WHITE, _GRAY, _BLACK = 0, 1, 2


@dataclass
class LayoutState:
    """Integer grid position per node; no two nodes share a cell."""

    positions: dict[NodeId, tuple[int, int]]
    col_count: int
    row_count: int

    @classmethod
    def from_positions(cls, positions: dict[NodeId, tuple[int, int]]) -> LayoutState:
        cols = [c for c, _ in positions.values()]
        rows = [r for _, r in positions.values()]
        state = cls(
            dict(positions),
            max(cols) + 1 if cols else 0,
            max(rows) + 1 if rows else 0,
        )
        state.validate()
        return state

    def validate(self) -> None:
        seen: set[tuple[int, int]] = set()
        for node, (col, row) in self.positions.items():
            if not (0 <= col < self.col_count and 0 <= row < self.row_count):
                raise ValueError(f"{node} at {(col, row)} outside the grid")
            if (col, row) in seen:
                raise ValueError(f"two nodes share cell {(col, row)}")
            seen.add((col, row))

    def occupied(self) -> dict[tuple[int, int], NodeId]:
        return {pos: node for node, pos in self.positions.items()}

    def copy(self) -> LayoutState:
        return LayoutState(dict(self.positions), self.col_count, self.row_count)


def back_edges(g: Graph) -> set[tuple[NodeId, NodeId]]:
    """Directed edges closing a cycle under DFS in input order.

    The conceptual virtual root is adjacent to all real nodes, so the
    search starts from each still-unvisited node in file order.
    """
    out: dict[NodeId, list[NodeId]] = {n.id: [] for n in g.nodes}
    for e in g.edges:
        out[e.source].append(e.target)
    color = {n.id: _WHITE for n in g.nodes}
    back: set[tuple[NodeId, NodeId]] = set()
    for node in g.nodes:
        if color[node.id] != _WHITE:
            continue
        color[node.id] = _GRAY
        stack = [(node.id, iter(out[node.id]))]
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if color[v] == _WHITE:
                    color[v] = _GRAY
                    stack.append((v, iter(out[v])))
                    advanced = True
                    break
                if color[v] == _GRAY:
                    back.add((u, v))
            if not advanced:
                color[u] = _BLACK
                stack.pop()
    return back


def retained_edges(g: Graph) -> list[tuple[NodeId, NodeId]]:
    """Edges kept for depth purposes (everything but DFS back edges)."""
    dropped = back_edges(g)
    return [(e.source, e.target) for e in g.edges if (e.source, e.target) not in dropped]


def assign_depths(g: Graph) -> dict[NodeId, int]:
    """Longest-path depth over retained edges; sources sit at depth 0.

    Depths are reported without the virtual root, so every retained edge
    u -> v satisfies depth(v) >= depth(u) + 1 and cyclic inputs still
    terminate (their back edges are excluded).
    """
    kept = retained_edges(g)
    out: dict[NodeId, list[NodeId]] = {n.id: [] for n in g.nodes}
    indeg = {n.id: 0 for n in g.nodes}
    for u, v in kept:
        out[u].append(v)
        indeg[v] += 1
    depth = {n.id: 0 for n in g.nodes}
    queue = [n.id for n in g.nodes if indeg[n.id] == 0]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for v in out[u]:
            depth[v] = max(depth[v], depth[u] + 1)
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return depth


def _dense_ranks(values: list[float]) -> dict[float, int]:
    return {v: i for i, v in enumerate(sorted(set(values)))}


def normalize_ranks(coords: dict[NodeId, tuple[float, float]]) -> LayoutState:
    """Replace both axes by dense ranks, then resolve row collisions.

    Ties share a rank; colliding nodes within a column are spread to
    consecutive free rows in input order, preserving vertical order.
    """
    if not coords:
        return LayoutState({}, 0, 0)
    xrank = _dense_ranks([x for x, _ in coords.values()])
    yrank = _dense_ranks([y for _, y in coords.values()])
    order = {node: i for i, node in enumerate(coords)}

    by_col: dict[int, list[tuple[int, int, NodeId]]] = {}
    for node, (x, y) in coords.items():
        by_col.setdefault(xrank[x], []).append((yrank[y], order[node], node))

    positions: dict[NodeId, tuple[int, int]] = {}
    for col, entries in by_col.items():
        used: set[int] = set()
        for rank, _, node in sorted(entries):
            row = rank
            while row in used:
                row += 1
            used.add(row)
            positions[node] = (col, row)
    ordered = {node: positions[node] for node in coords}
    return LayoutState.from_positions(ordered)
