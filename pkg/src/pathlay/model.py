"""Graph data model: nodes, directed edges, complexes, groups, adjacency.

Node ids are decimal literals: an integer id names an ordinary node or a
complex container, a one-decimal float id (``"3.1"``) names a member of
the complex whose id is the integer part. The graph is immutable after
``build_graph`` and safe to share read-only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

_ID_RE = re.compile(r"^(\d+)(?:\.(\d))?$")


class GraphError(Exception):
    """Base class for graph validation failures."""


class DuplicateNodeId(GraphError):
    pass


class UnknownEndpoint(GraphError):
    pass


class OrphanComplexMember(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class OverlappingGroups(GraphError):
    pass


class UnknownGroupMember(GraphError):
    pass


@dataclass(frozen=True)
class NodeId:
    """A node identifier as written in the input: ``"7"`` or ``"7.2"``."""

    raw: str

    def __post_init__(self) -> None:
        if not _ID_RE.match(self.raw):
            raise ValueError(f"malformed node id {self.raw!r}")

    @property
    def is_complex_member(self) -> bool:
        return "." in self.raw

    @property
    def container(self) -> NodeId | None:
        """Id of the enclosing complex, or None for integer ids."""
        if not self.is_complex_member:
            return None
        return NodeId(self.raw.split(".", 1)[0])

    def sort_key(self) -> tuple[int, int]:
        m = _ID_RE.match(self.raw)
        assert m is not None
        return (int(m.group(1)), -1 if m.group(2) is None else int(m.group(2)))

    def __str__(self) -> str:
        return self.raw


class Shape(str, Enum):
    RECTANGLE = "rectangle"
    ROUNDED_RECTANGLE = "rounded-rectangle"
    CIRCLE = "circle"
    COMPOUND = "compound"


class LineStyle(str, Enum):
    SOLID = "solid"
    DASHED = "dashed"


class ArrowStyle(str, Enum):
    SOLID_ARROW = "solid-arrow"
    OPEN_ARROW = "open-arrow"
    TEE = "tee"
    NONE = "none"


class ExtraSegment(str, Enum):
    NONE = "none"
    DISSOCIATION_BAR = "dissociation-bar"


class GroupPolicy(str, Enum):
    FOREMOST = "foremost"
    LAST = "last"
    VOTING = "voting"


@dataclass(frozen=True)
class Node:
    id: NodeId
    shape: Shape
    label: str
    fill_color: str
    text_color: str

    def __post_init__(self) -> None:
        if not self.label.strip():
            raise ValueError(f"node {self.id}: empty label")


@dataclass(frozen=True)
class Edge:
    source: NodeId
    target: NodeId
    line_style: LineStyle = LineStyle.SOLID
    arrow_style: ArrowStyle = ArrowStyle.SOLID_ARROW
    script: str = ""
    extra_segment: ExtraSegment = ExtraSegment.NONE


@dataclass(frozen=True)
class Group:
    members: frozenset[NodeId]
    policy: GroupPolicy


@dataclass(frozen=True)
class Graph:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    groups: tuple[Group, ...]
    _index: dict[NodeId, int] = field(repr=False, compare=False, default_factory=dict)

    def node_ids(self) -> list[NodeId]:
        return [n.id for n in self.nodes]

    def index_of(self, node_id: NodeId) -> int:
        return self._index[node_id]

    def node(self, node_id: NodeId) -> Node:
        return self.nodes[self._index[node_id]]

    def __contains__(self, node_id: NodeId) -> bool:
        return node_id in self._index

    def complex_members(self, container: NodeId) -> list[NodeId]:
        return [n.id for n in self.nodes if n.id.container == container]

    def containers(self) -> list[NodeId]:
        seen = []
        for n in self.nodes:
            c = n.id.container
            if c is not None and c not in seen:
                seen.append(c)
        return seen


def build_graph(nodes: list[Node], edges: list[Edge], groups: list[Group] = ()) -> Graph:
    """Validate and assemble a Graph.

    Raises DuplicateNodeId, UnknownEndpoint, OrphanComplexMember, SelfLoop,
    OverlappingGroups or UnknownGroupMember on any invariant violation.
    Exact duplicate (source, target) edges are collapsed to the first
    occurrence so the edge set stays simple.
    """
    index: dict[NodeId, int] = {}
    for i, node in enumerate(nodes):
        if node.id in index:
            raise DuplicateNodeId(f"duplicate node id {node.id}")
        index[node.id] = i

    for node in nodes:
        container = node.id.container
        if container is not None and container not in index:
            raise OrphanComplexMember(
                f"complex member {node.id} has no container node {container}"
            )

    kept: list[Edge] = []
    seen_pairs: set[tuple[NodeId, NodeId]] = set()
    for edge in edges:
        if edge.source == edge.target:
            raise SelfLoop(f"self loop on {edge.source}")
        for endpoint in (edge.source, edge.target):
            if endpoint not in index:
                raise UnknownEndpoint(f"edge references missing node {endpoint}")
        pair = (edge.source, edge.target)
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        kept.append(edge)

    claimed: set[NodeId] = set()
    for group in groups:
        if not group.members:
            raise ValueError("group with no members")
        for member in group.members:
            if member not in index:
                raise UnknownGroupMember(f"group references missing node {member}")
            if member in claimed:
                raise OverlappingGroups(f"node {member} appears in two groups")
            claimed.add(member)

    return Graph(tuple(nodes), tuple(kept), tuple(groups), index)


def undirected_adjacency(g: Graph) -> dict[NodeId, set[NodeId]]:
    """Symmetric neighbor map; antiparallel edge pairs collapse to one."""
    adj: dict[NodeId, set[NodeId]] = {n.id: set() for n in g.nodes}
    for e in g.edges:
        adj[e.source].add(e.target)
        adj[e.target].add(e.source)
    return adj


def degree(g: Graph, node_id: NodeId) -> int:
    return len(undirected_adjacency(g)[node_id])


def undirected_edge_pairs(g: Graph) -> list[tuple[NodeId, NodeId]]:
    """Edges as undirected pairs, antiparallel duplicates collapsed.

    Layout math and metrics run on this set; rendering keeps both
    directions of an antiparallel pair.
    """
    seen: set[frozenset[NodeId]] = set()
    pairs = []
    for e in g.edges:
        key = frozenset((e.source, e.target))
        if key in seen:
            continue
        seen.add(key)
        pairs.append((e.source, e.target))
    return pairs


def connected_components(g: Graph) -> list[list[NodeId]]:
    """Components of the undirected graph, ordered by first node appearance."""
    adj = undirected_adjacency(g)
    seen: set[NodeId] = set()
    components: list[list[NodeId]] = []
    order = {n.id: i for i, n in enumerate(g.nodes)}
    for node in g.nodes:
        if node.id in seen:
            continue
        comp = []
        stack = [node.id]
        seen.add(node.id)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in sorted(adj[v], key=lambda x: order[x], reverse=True):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comp.sort(key=lambda x: order[x])
        components.append(comp)
    return components
