"""Pixel geometry and SVG emission.

Text uses a fixed-metric monospace model (no font rasterization), so
node sizes, the cumulative column/row offsets derived from them, and the
emitted SVG are all exact integers and byte-stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

from .geometry import Rect
from .layering import LayoutState
from .model import ArrowStyle, ExtraSegment, Graph, LineStyle, NodeId, Shape
from .route import RoutedEdge

CHAR_WIDTH = 7
LINE_HEIGHT = 14
PADDING = 4
DEFAULT_NODE_LENGTH = 60
GUTTER = 24
OUTER_MARGIN = 16
FONT_SIZE = 11
COMPLEX_PADDING = 6
TICK_HALF = 5


@dataclass(frozen=True)
class NodeGeometry:
    node: NodeId
    x: int
    y: int
    width: int
    height: int
    lines: tuple[str, ...]

    def rect(self) -> Rect:
        return Rect(self.x, self.y, self.x + self.width, self.y + self.height)


@dataclass(frozen=True)
class Canvas:
    col_offsets: tuple[int, ...]
    row_offsets: tuple[int, ...]
    col_widths: tuple[int, ...]
    row_heights: tuple[int, ...]
    width: int
    height: int


def wrap_text(
    label: str,
    default_length: int = DEFAULT_NODE_LENGTH,
    char_width: int = CHAR_WIDTH,
) -> tuple[list[str], int]:
    """Greedy word wrap against max(default length, longest word width).

    Returns (lines, node length in pixels); a new line starts whenever
    the next word would overflow the node length.
    """
    words = label.split()
    length = max(default_length, max(len(w) for w in words) * char_width)
    lines: list[str] = []
    current = ""
    for word in words:
        candidate = word if not current else current + " " + word
        if len(candidate) * char_width <= length:
            current = candidate
        else:
            lines.append(current)
            current = word
    lines.append(current)
    return lines, length


def node_box_size(
    label: str,
    default_length: int = DEFAULT_NODE_LENGTH,
    char_width: int = CHAR_WIDTH,
    line_height: int = LINE_HEIGHT,
    padding: int = PADDING,
) -> tuple[int, int, tuple[str, ...]]:
    """(width, height, wrapped lines) of a node box."""
    lines, length = wrap_text(label, default_length, char_width)
    widest = max(len(line) * char_width for line in lines)
    width = max(default_length, widest) + 2 * padding
    height = len(lines) * line_height + 2 * padding
    return width, height, tuple(lines)


def layout_canvas(
    s: LayoutState,
    sizes: dict[NodeId, tuple[int, int, tuple[str, ...]]],
    gutter: int = GUTTER,
    outer_margin: int = OUTER_MARGIN,
) -> tuple[Canvas, dict[NodeId, NodeGeometry]]:
    """Cumulative pixel offsets from per-column widths and per-row
    heights; boxes are centered in their column and top-aligned in their
    row. Guaranteed non-overlapping."""
    col_widths = [0] * s.col_count
    row_heights = [0] * s.row_count
    for node, (col, row) in s.positions.items():
        w, h, _ = sizes[node]
        col_widths[col] = max(col_widths[col], w)
        row_heights[row] = max(row_heights[row], h)

    col_offsets = []
    acc = 0
    for w in col_widths:
        col_offsets.append(acc)
        acc += w + gutter
    span_w = acc - gutter if col_widths else 0

    row_offsets = []
    acc = 0
    for h in row_heights:
        row_offsets.append(acc)
        acc += h + gutter
    span_h = acc - gutter if row_heights else 0

    canvas = Canvas(
        tuple(col_offsets),
        tuple(row_offsets),
        tuple(col_widths),
        tuple(row_heights),
        span_w + 2 * outer_margin,
        span_h + 2 * outer_margin,
    )

    geoms: dict[NodeId, NodeGeometry] = {}
    for node, (col, row) in s.positions.items():
        w, h, lines = sizes[node]
        x = outer_margin + col_offsets[col] + (col_widths[col] - w) // 2
        y = outer_margin + row_offsets[row]
        geoms[node] = NodeGeometry(node, x, y, w, h, lines)

    boxes = sorted(geoms.values(), key=lambda g: (g.x, g.y))
    for i, a in enumerate(boxes):
        for b in boxes[i + 1 :]:
            if b.x >= a.x + a.width + 1:
                break
            if a.x < b.x + b.width and b.x < a.x + a.width and a.y < b.y + b.height and b.y < a.y + a.height:
                raise AssertionError(f"node boxes overlap: {a.node} and {b.node}")
    return canvas, geoms


def complex_enclosure(
    members: list[NodeGeometry], padding: int = COMPLEX_PADDING
) -> Rect:
    """Box containing every member box plus padding."""
    xmin = min(m.x for m in members) - padding
    ymin = min(m.y for m in members) - padding
    xmax = max(m.x + m.width for m in members) + padding
    ymax = max(m.y + m.height for m in members) + padding
    return Rect(xmin, ymin, xmax, ymax)


def _fmt(v: float) -> str:
    return f"{v:g}"


def _polyline_midpoint(points: list[tuple[int, int]]) -> tuple[float, float, tuple[int, int]]:
    """Point at half the polyline's length plus its segment direction."""
    seg_lengths = [
        abs(b[0] - a[0]) + abs(b[1] - a[1]) for a, b in zip(points, points[1:])
    ]
    half = sum(seg_lengths) / 2
    run = 0.0
    for (a, b), ln in zip(zip(points, points[1:]), seg_lengths):
        if run + ln >= half and ln > 0:
            t = (half - run) / ln
            x = a[0] + (b[0] - a[0]) * t
            y = a[1] + (b[1] - a[1]) * t
            dx = (b[0] > a[0]) - (b[0] < a[0])
            dy = (b[1] > a[1]) - (b[1] < a[1])
            return x, y, (dx, dy)
        run += ln
    a, b = points[0], points[-1]
    return (a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (1, 0)


_MARKERS = {
    ArrowStyle.SOLID_ARROW: (
        "m-solid",
        '<marker id="m-solid" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="8" markerHeight="8" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="black"/></marker>',
    ),
    ArrowStyle.OPEN_ARROW: (
        "m-open",
        '<marker id="m-open" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="9" markerHeight="9" orient="auto-start-reverse">'
        '<path d="M 1 1 L 9 5 L 1 9" fill="none" stroke="black"/></marker>',
    ),
    ArrowStyle.TEE: (
        "m-tee",
        '<marker id="m-tee" viewBox="0 0 10 10" refX="5" refY="5" '
        'markerWidth="9" markerHeight="9" orient="auto-start-reverse">'
        '<path d="M 5 0 L 5 10" stroke="black" stroke-width="2"/></marker>',
    ),
}


def emit_svg(
    g: Graph,
    geoms: dict[NodeId, NodeGeometry],
    routed: list[RoutedEdge],
    width: int,
    height: int,
    font_size: int = FONT_SIZE,
    line_height: int = LINE_HEIGHT,
    padding: int = PADDING,
) -> str:
    """Standalone SVG 1.1 document.

    Element order is deterministic: complex enclosures behind, node
    shapes by id, then edges in input order. Dashed styles, arrowhead
    markers, dissociation ticks, and script labels follow the edge
    metadata.
    """
    xmin, ymin, xmax, ymax = 0, 0, width, height
    for r in routed:
        for x, y in r.points:
            xmin = min(xmin, x - 4)
            ymin = min(ymin, y - 4)
            xmax = max(xmax, x + 4)
            ymax = max(ymax, y + 4)

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{xmax - xmin}" height="{ymax - ymin}" '
        f'viewBox="{xmin} {ymin} {xmax - xmin} {ymax - ymin}">'
    )

    used = sorted(
        {r.edge.arrow_style for r in routed if r.edge.arrow_style in _MARKERS},
        key=lambda a: a.value,
    )
    if used:
        out.append("<defs>")
        for style in used:
            out.append(_MARKERS[style][1])
        out.append("</defs>")

    for container in sorted(g.containers(), key=NodeId.sort_key):
        members = [geoms[m] for m in g.complex_members(container) if m in geoms]
        if not members:
            continue
        box = complex_enclosure(members)
        fill = g.node(container).fill_color
        out.append(
            f'<rect x="{_fmt(box.xmin)}" y="{_fmt(box.ymin)}" '
            f'width="{_fmt(box.xmax - box.xmin)}" height="{_fmt(box.ymax - box.ymin)}" '
            f'fill="{fill}" fill-opacity="0.15" stroke="black" '
            'stroke-dasharray="4 2"/>'
        )
        if container not in geoms:
            label = escape(g.node(container).label)
            out.append(
                f'<text x="{_fmt(box.xmin + 2)}" y="{_fmt(box.ymin - 3)}" '
                f'font-family="monospace" font-size="{font_size}" '
                f'fill="{g.node(container).text_color}">{label}</text>'
            )

    for node_id in sorted(geoms, key=NodeId.sort_key):
        geom = geoms[node_id]
        node = g.node(node_id)
        if node.shape in (Shape.CIRCLE, Shape.COMPOUND):
            out.append(
                f'<ellipse cx="{_fmt(geom.x + geom.width / 2)}" '
                f'cy="{_fmt(geom.y + geom.height / 2)}" '
                f'rx="{_fmt(geom.width / 2)}" ry="{_fmt(geom.height / 2)}" '
                f'fill="{node.fill_color}" stroke="black"/>'
            )
        else:
            rounding = ' rx="6" ry="6"' if node.shape is Shape.ROUNDED_RECTANGLE else ""
            out.append(
                f'<rect x="{geom.x}" y="{geom.y}" width="{geom.width}" '
                f'height="{geom.height}"{rounding} '
                f'fill="{node.fill_color}" stroke="black"/>'
            )
        cx = geom.x + geom.width / 2
        for i, line in enumerate(geom.lines):
            cy = geom.y + padding + i * line_height + line_height / 2
            out.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
                f'dominant-baseline="central" font-family="monospace" '
                f'font-size="{font_size}" fill="{node.text_color}">{escape(line)}</text>'
            )

    for r in routed:
        pts = " ".join(f"{x},{y}" for x, y in r.points)
        dash = ' stroke-dasharray="6 4"' if r.edge.line_style is LineStyle.DASHED else ""
        marker = ""
        if r.edge.arrow_style in _MARKERS:
            marker = f' marker-end="url(#{_MARKERS[r.edge.arrow_style][0]})"'
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="black"{dash}{marker}/>'
        )
        if r.edge.extra_segment is ExtraSegment.DISSOCIATION_BAR or r.edge.script:
            mx, my, (dx, dy) = _polyline_midpoint(r.points)
            if r.edge.extra_segment is ExtraSegment.DISSOCIATION_BAR:
                px, py = -dy, dx
                out.append(
                    f'<line x1="{_fmt(mx - px * TICK_HALF)}" y1="{_fmt(my - py * TICK_HALF)}" '
                    f'x2="{_fmt(mx + px * TICK_HALF)}" y2="{_fmt(my + py * TICK_HALF)}" '
                    'stroke="black" stroke-width="2"/>'
                )
            if r.edge.script:
                out.append(
                    f'<text x="{_fmt(mx)}" y="{_fmt(my - 4)}" text-anchor="middle" '
                    f'font-family="monospace" font-size="{font_size - 2}" '
                    f'fill="black">{escape(r.edge.script)}</text>'
                )

    out.append("</svg>")
    return "\n".join(out) + "\n"
