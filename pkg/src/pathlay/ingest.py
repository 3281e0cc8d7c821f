"""Parsers for the tab-separated node, edge, and group description files.

Formats (one record per line, ``#`` starts a comment line, blank lines
are skipped):

    nodes.tsv   id<TAB>shape<TAB>label<TAB>fill_color<TAB>text_color
    edges.tsv   source<TAB>target<TAB>line_style<TAB>arrow_style<TAB>script<TAB>extra_segment
    groups.tsv  policy<TAB>id1<TAB>id2...

Colors are the 140 standard CSS names or ``#RRGGBB``. All parse errors
carry the 1-based line number of the offending record.
"""

from __future__ import annotations

import re

from .colors import NAMED_COLORS
from .model import (
    ArrowStyle,
    Edge,
    ExtraSegment,
    Group,
    GroupPolicy,
    LineStyle,
    Node,
    NodeId,
    Shape,
)

_HEX_COLOR_RE = re.compile(r"^#[0-9a-fA-F]{6}$")

NODE_FIELD_COUNT = 5
EDGE_FIELD_COUNT = 6


class ParseError(Exception):
    """A malformed input line; ``line`` is 1-based."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class BadFieldCount(ParseError):
    pass


class BadNumericId(ParseError):
    pass


class UnknownShape(ParseError):
    pass


class UnknownColor(ParseError):
    pass


class UnknownLineStyle(ParseError):
    pass


class UnknownArrowStyle(ParseError):
    pass


class UnknownExtraSegment(ParseError):
    pass


class UnknownPolicy(ParseError):
    pass


class EmptyGroup(ParseError):
    pass


def _records(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip("\r\n")
        if not stripped.strip() or stripped.lstrip().startswith("#"):
            continue
        yield lineno, stripped


def _parse_id(lineno: int, raw: str) -> NodeId:
    try:
        return NodeId(raw)
    except ValueError:
        raise BadNumericId(lineno, f"bad node id {raw!r}") from None


def _parse_color(lineno: int, raw: str) -> str:
    if _HEX_COLOR_RE.match(raw):
        return raw.lower()
    lowered = raw.lower()
    if lowered in NAMED_COLORS:
        return lowered
    raise UnknownColor(lineno, f"unknown color {raw!r}")


def parse_node_file(text: str) -> list[Node]:
    """One Node per record line, input order preserved."""
    nodes = []
    for lineno, line in _records(text):
        fields = line.split("\t")
        if len(fields) != NODE_FIELD_COUNT:
            raise BadFieldCount(
                lineno, f"expected {NODE_FIELD_COUNT} fields, got {len(fields)}"
            )
        raw_id, raw_shape, label, fill, text_color = fields
        node_id = _parse_id(lineno, raw_id)
        try:
            shape = Shape(raw_shape)
        except ValueError:
            raise UnknownShape(lineno, f"unknown shape {raw_shape!r}") from None
        if not label.strip():
            raise ParseError(lineno, "empty node label")
        nodes.append(
            Node(
                id=node_id,
                shape=shape,
                label=label,
                fill_color=_parse_color(lineno, fill),
                text_color=_parse_color(lineno, text_color),
            )
        )
    return nodes


def parse_edge_file(text: str) -> list[Edge]:
    """One Edge per record line; the script field may be empty."""
    edges = []
    for lineno, line in _records(text):
        fields = line.split("\t")
        if len(fields) != EDGE_FIELD_COUNT:
            raise BadFieldCount(
                lineno, f"expected {EDGE_FIELD_COUNT} fields, got {len(fields)}"
            )
        raw_src, raw_tgt, raw_line, raw_arrow, script, raw_extra = fields
        try:
            line_style = LineStyle(raw_line)
        except ValueError:
            raise UnknownLineStyle(lineno, f"unknown line style {raw_line!r}") from None
        try:
            arrow_style = ArrowStyle(raw_arrow)
        except ValueError:
            raise UnknownArrowStyle(lineno, f"unknown arrow style {raw_arrow!r}") from None
        try:
            extra = ExtraSegment(raw_extra)
        except ValueError:
            raise UnknownExtraSegment(
                lineno, f"unknown extra segment {raw_extra!r}"
            ) from None
        edges.append(
            Edge(
                source=_parse_id(lineno, raw_src),
                target=_parse_id(lineno, raw_tgt),
                line_style=line_style,
                arrow_style=arrow_style,
                script=script,
                extra_segment=extra,
            )
        )
    return edges


def parse_group_file(text: str) -> list[Group]:
    """One group per record line: policy then at least one member id."""
    groups = []
    for lineno, line in _records(text):
        fields = line.split("\t")
        raw_policy, member_fields = fields[0], fields[1:]
        try:
            policy = GroupPolicy(raw_policy)
        except ValueError:
            raise UnknownPolicy(lineno, f"unknown group policy {raw_policy!r}") from None
        members = [_parse_id(lineno, raw) for raw in member_fields if raw != ""]
        if not members:
            raise EmptyGroup(lineno, "group has no members")
        groups.append(Group(members=frozenset(members), policy=policy))
    return groups


def format_node_line(node: Node) -> str:
    return "\t".join(
        [node.id.raw, node.shape.value, node.label, node.fill_color, node.text_color]
    )


def format_edge_line(edge: Edge) -> str:
    return "\t".join(
        [
            edge.source.raw,
            edge.target.raw,
            edge.line_style.value,
            edge.arrow_style.value,
            edge.script,
            edge.extra_segment.value,
        ]
    )


def format_group_line(group: Group) -> str:
    members = sorted(group.members, key=NodeId.sort_key)
    return "\t".join([group.policy.value] + [m.raw for m in members])


def write_node_file(nodes: list[Node]) -> str:
    return "".join(format_node_line(n) + "\n" for n in nodes)


def write_edge_file(edges: list[Edge]) -> str:
    return "".join(format_edge_line(e) + "\n" for e in edges)


def write_group_file(groups: list[Group]) -> str:
    return "".join(format_group_line(g) + "\n" for g in groups)
