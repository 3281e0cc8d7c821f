"""Obstacle-avoiding edge routing in pixel space.

Unblocked edges stay direct segments. Blocked edges whose endpoints
share a grid row or column take a 3-segment bypass (above for rows, to
the right for columns), with first-fit level separation when several
bypasses share a detour coordinate. Everything else is routed on a
5-pixel virtual grid: four side-representative nodes per box, BFS over
the 16 face pairs, winner by fewest bends then shortest path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import grid_bfs_dist
from .geometry import Rect, Segment, edge_node_overlaps
from .model import Edge, NodeId

GRID_PITCH = 5
GRID_MARGIN_CELLS = 4
BASE_BYPASS_MARGIN = 8
OBSTACLE_CLEARANCE = 2

FACES = ("top", "right", "bottom", "left")

Point = tuple[int, int]


class NoPath(Exception):
    """All 16 face-pair searches failed."""


class NotAxisAligned(Exception):
    """Bypass routing requires endpoints sharing a grid row or column."""


@dataclass
class RoutedEdge:
    edge: Edge
    points: list[Point]
    bends: int
    level: int = 0
    kind: str = "direct"
    faces: tuple[str, str] = ("right", "left")


def simplify(points: list[Point]) -> list[Point]:
    """Drop repeated points and collapse collinear middles.

    Backtracking spurs (a reversal along the same line, as stub
    rebuilding can produce) collapse too; the result always covers a
    subset of the original pixels, so it can only lose offenses.
    """
    out: list[Point] = []
    for p in points:
        if out and p == out[-1]:
            continue
        while len(out) >= 2:
            a, b = out[-2], out[-1]
            cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            if cross == 0:
                out.pop()
            else:
                break
        if out and p == out[-1]:
            continue
        out.append(p)
    return out


def count_bends(points: list[Point]) -> int:
    """Motion-direction changes along the polyline."""
    bends = 0
    prev_dir = None
    for a, b in zip(points, points[1:]):
        direction = (
            (b[0] > a[0]) - (b[0] < a[0]),
            (b[1] > a[1]) - (b[1] < a[1]),
        )
        if prev_dir is not None and direction != prev_dir:
            bends += 1
        prev_dir = direction
    return bends


def polyline_length(points: list[Point]) -> int:
    return sum(
        abs(b[0] - a[0]) + abs(b[1] - a[1]) for a, b in zip(points, points[1:])
    )


def face_midpoint(box: Rect, face: str) -> Point:
    cx = int((box.xmin + box.xmax) // 2)
    cy = int((box.ymin + box.ymax) // 2)
    if face == "top":
        return (cx, int(box.ymin))
    if face == "bottom":
        return (cx, int(box.ymax))
    if face == "left":
        return (int(box.xmin), cy)
    if face == "right":
        return (int(box.xmax), cy)
    raise ValueError(face)


def bypass_route(start: Point, end: Point, shared: str, margin: int) -> list[Point]:
    """Three-segment detour: above the row ('row') or right of the
    column ('col'). The shelf coordinate sits ``margin`` pixels outside
    the band shared by both endpoints."""
    if shared == "row":
        shelf = min(start[1], end[1]) - margin
        return [start, (start[0], shelf), (end[0], shelf), end]
    if shared == "col":
        shelf = max(start[0], end[0]) + margin
        return [start, (shelf, start[1]), (shelf, end[1]), end]
    raise NotAxisAligned(f"unknown shared axis {shared!r}")


def separate_levels(intervals: list[tuple[float, float]]) -> list[int]:
    """First-fit level per interval: an interval joins the lowest level
    where it sits below all residents, above all residents, or inside a
    vacancy between two sorted residents; touching counts as overlap."""
    levels: list[list[tuple[float, float]]] = []
    assigned = []
    for lo, hi in intervals:
        placed = None
        for li, residents in enumerate(levels):
            occupied = sorted(residents)
            if hi < occupied[0][0] or lo > occupied[-1][1]:
                placed = li
            else:
                for (_, prev_hi), (next_lo, _) in zip(occupied, occupied[1:]):
                    if prev_hi < lo and hi < next_lo:
                        placed = li
                        break
            if placed is not None:
                break
        if placed is None:
            levels.append([])
            placed = len(levels) - 1
        levels[placed].append((lo, hi))
        assigned.append(placed)
    return assigned


@dataclass
class VirtualGrid:
    """Lattice of candidate waypoints at a fixed pitch; cells inside any
    inflated real node box are deleted."""

    x0: int
    y0: int
    nx: int
    ny: int
    pitch: int
    blocked: np.ndarray = field(repr=False)

    def point(self, cell: Point) -> Point:
        return (self.x0 + cell[0] * self.pitch, self.y0 + cell[1] * self.pitch)

    def contains(self, cell: Point) -> bool:
        return 0 <= cell[0] < self.nx and 0 <= cell[1] < self.ny


def build_virtual_grid(
    endpoint_boxes: tuple[Rect, Rect],
    all_boxes: list[Rect],
    pitch: int = GRID_PITCH,
    margin_cells: int = GRID_MARGIN_CELLS,
    clearance: int = OBSTACLE_CLEARANCE,
) -> VirtualGrid:
    """Grid spanning both endpoint boxes plus a margin; nodes within
    ``clearance`` of any box (boundary inclusive) are masked out."""
    a, b = endpoint_boxes
    margin = margin_cells * pitch
    xmin = int(min(a.xmin, b.xmin)) - margin
    ymin = int(min(a.ymin, b.ymin)) - margin
    xmax = int(max(a.xmax, b.xmax)) + margin
    ymax = int(max(a.ymax, b.ymax)) + margin
    x0 = (xmin // pitch) * pitch
    y0 = (ymin // pitch) * pitch
    nx = (xmax - x0) // pitch + 1
    ny = (ymax - y0) // pitch + 1
    blocked = np.zeros((nx, ny), dtype=np.uint8)
    for box in all_boxes:
        bx0 = int(box.xmin) - clearance
        by0 = int(box.ymin) - clearance
        bx1 = int(box.xmax) + clearance
        by1 = int(box.ymax) + clearance
        i_lo = max(0, -((x0 - bx0) // pitch))
        i_hi = min(nx - 1, (bx1 - x0) // pitch)
        j_lo = max(0, -((y0 - by0) // pitch))
        j_hi = min(ny - 1, (by1 - y0) // pitch)
        if i_lo <= i_hi and j_lo <= j_hi:
            blocked[i_lo : i_hi + 1, j_lo : j_hi + 1] = 1
    return VirtualGrid(x0, y0, nx, ny, pitch, blocked)


def face_representative(grid: VirtualGrid, box: Rect, face: str) -> Point | None:
    """Surviving lattice cell just outside the box at the face midpoint."""
    clearance = OBSTACLE_CLEARANCE
    p = grid.pitch
    cx = int((box.xmin + box.xmax) // 2)
    cy = int((box.ymin + box.ymax) // 2)
    if face == "top":
        j = (int(box.ymin) - clearance - 1 - grid.y0) // p
        i = round((cx - grid.x0) / p)
    elif face == "bottom":
        j = -((grid.y0 - int(box.ymax) - clearance - 1) // p)
        i = round((cx - grid.x0) / p)
    elif face == "left":
        i = (int(box.xmin) - clearance - 1 - grid.x0) // p
        j = round((cy - grid.y0) / p)
    else:
        i = -((grid.x0 - int(box.xmax) - clearance - 1) // p)
        j = round((cy - grid.y0) / p)
    cell = (int(i), int(j))
    if not grid.contains(cell) or grid.blocked[cell[0], cell[1]]:
        return None
    return cell


_WALK_PRIORITY = ((0, -1), (-1, 0), (0, 1), (1, 0))


def _walk_back(dist: np.ndarray, target: Point) -> list[Point]:
    """Deterministic shortest lattice path from the BFS source to target,
    reconstructed by descending the distance field."""
    path = [target]
    i, j = target
    d = int(dist[i, j])
    nx, ny = dist.shape
    while d > 0:
        for di, dj in _WALK_PRIORITY:
            ni, nj = i + di, j + dj
            if 0 <= ni < nx and 0 <= nj < ny and dist[ni, nj] == d - 1:
                i, j = ni, nj
                d -= 1
                path.append((i, j))
                break
        else:
            raise AssertionError("broken distance field")
    path.reverse()
    return path


def _stub(anchor: Point, rep_pt: Point, face: str) -> list[Point]:
    """Orthogonal connection from a face anchor to its representative."""
    if face in ("top", "bottom"):
        return [anchor, (anchor[0], rep_pt[1]), rep_pt]
    return [anchor, (rep_pt[0], anchor[1]), rep_pt]


def _assemble(
    grid: VirtualGrid,
    source_box: Rect,
    target_box: Rect,
    face_s: str,
    face_t: str,
    cells: list[Point],
    anchor_s: Point | None = None,
    anchor_t: Point | None = None,
) -> list[Point]:
    a_s = anchor_s if anchor_s is not None else face_midpoint(source_box, face_s)
    a_t = anchor_t if anchor_t is not None else face_midpoint(target_box, face_t)
    lattice = [grid.point(c) for c in cells]
    pts = (
        _stub(a_s, lattice[0], face_s)
        + lattice[1:-1]
        + list(reversed(_stub(a_t, lattice[-1], face_t)))
    )
    return simplify(pts)


def route_edge(
    grid: VirtualGrid, source_box: Rect, target_box: Rect
) -> tuple[list[Point], tuple[str, str], list[Point]]:
    """Best of the 16 face-pair BFS routes.

    Minimizes bend count (the stub joint bends included), then path
    length, then the fixed (top, right, bottom, left) enumeration order.
    Returns (polyline, faces, lattice cells). Raises NoPath when no pair
    connects.
    """
    best = None
    pair_index = -1
    for face_s in FACES:
        rep_s = face_representative(grid, source_box, face_s)
        if rep_s is None:
            pair_index += 4
            continue
        dist = grid_bfs_dist(grid.blocked, rep_s[0], rep_s[1])
        for face_t in FACES:
            pair_index += 1
            rep_t = face_representative(grid, target_box, face_t)
            if rep_t is None or dist[rep_t[0], rep_t[1]] < 0:
                continue
            cells = _walk_back(dist, rep_t)
            pts = _assemble(grid, source_box, target_box, face_s, face_t, cells)
            key = (count_bends(pts), polyline_length(pts), pair_index)
            if best is None or key < best[0]:
                best = (key, pts, (face_s, face_t), cells)
    if best is None:
        raise NoPath("no face pair connects the two boxes")
    return best[1], best[2], best[3]


def polyline_offenses(
    points: list[Point],
    obstacle_rects: list[Rect],
    exempt: set[int],
) -> list[tuple[int, int]]:
    """Offending (segment, box) pairs for one routed polyline."""
    segments = [
        Segment((float(a[0]), float(a[1])), (float(b[0]), float(b[1])))
        for a, b in zip(points, points[1:])
        if a != b
    ]
    return edge_node_overlaps(segments, obstacle_rects, exempt)


@dataclass
class _Plan:
    edge: Edge
    kind: str
    faces: tuple[str, str]
    points: list[Point] = field(default_factory=list)
    level: int = 0
    margin: int = 0
    grid: VirtualGrid | None = None
    cells: list[Point] = field(default_factory=list)
    anchors: list[Point | None] = field(default_factory=lambda: [None, None])


def _pick_faces(bu: Rect, bv: Rect) -> tuple[str, str]:
    dx = (bv.xmin + bv.xmax) - (bu.xmin + bu.xmax)
    dy = (bv.ymin + bv.ymax) - (bu.ymin + bu.ymax)
    if abs(dx) >= abs(dy):
        return ("right", "left") if dx >= 0 else ("left", "right")
    return ("bottom", "top") if dy >= 0 else ("top", "bottom")


def _grid_route(
    bu: Rect,
    bv: Rect,
    obstacle_rects: list[Rect],
    pitch: int,
    margin_cells: int,
):
    """Grid-route with growing span margins before giving up."""
    for cells_margin in (margin_cells, margin_cells * 2, margin_cells * 4):
        grid = build_virtual_grid((bu, bv), obstacle_rects, pitch, cells_margin)
        try:
            pts, faces, cells = route_edge(grid, bu, bv)
            return grid, pts, faces, cells
        except NoPath:
            continue
    return None


def _grid_route_fixed(
    bu: Rect,
    bv: Rect,
    obstacle_rects: list[Rect],
    faces: tuple[str, str],
    anchors: tuple[Point, Point],
    pitch: int,
    margin_cells: int,
):
    """Grid-route between two already-chosen faces and anchors."""
    for cells_margin in (margin_cells, margin_cells * 2, margin_cells * 4):
        grid = build_virtual_grid((bu, bv), obstacle_rects, pitch, cells_margin)
        rep_s = face_representative(grid, bu, faces[0])
        rep_t = face_representative(grid, bv, faces[1])
        if rep_s is None or rep_t is None:
            continue
        dist = grid_bfs_dist(grid.blocked, rep_s[0], rep_s[1])
        if dist[rep_t[0], rep_t[1]] < 0:
            continue
        cells = _walk_back(dist, rep_t)
        pts = _assemble(grid, bu, bv, faces[0], faces[1], cells, anchors[0], anchors[1])
        return grid, pts, cells
    return None


def route_graph(
    g,
    grid_pos: dict[NodeId, tuple[int, int]],
    boxes: dict[NodeId, Rect],
    obstacle_ids: list[NodeId],
    base_margin: int = BASE_BYPASS_MARGIN,
    pitch: int = GRID_PITCH,
    margin_cells: int = GRID_MARGIN_CELLS,
) -> tuple[list[RoutedEdge], list[str]]:
    """Route every edge of the graph into a pixel polyline.

    grid_pos holds the (col, row) of placed nodes (complex containers
    are anchored on their enclosure boxes and have no cell); boxes maps
    every anchorable id to its pixel box; obstacle_ids are the placed
    node boxes that edges must not overlap. Returns routed edges in
    input order plus diagnostics for any edge left dirty.
    """
    obstacle_rects = [boxes[i] for i in obstacle_ids]
    obstacle_index = {i: k for k, i in enumerate(obstacle_ids)}
    diagnostics: list[str] = []

    def exempt_for(edge: Edge) -> set[int]:
        return {
            obstacle_index[n]
            for n in (edge.source, edge.target)
            if n in obstacle_index
        }

    def offends(points: list[Point], edge: Edge) -> bool:
        return bool(polyline_offenses(points, obstacle_rects, exempt_for(edge)))

    row_top: dict[int, int] = {}
    col_right: dict[int, int] = {}
    for node, (col, row) in grid_pos.items():
        box = boxes[node]
        row_top[row] = min(row_top.get(row, int(box.ymin)), int(box.ymin))
        col_right[col] = max(col_right.get(col, int(box.xmax)), int(box.xmax))

    plans: list[_Plan] = []
    bypass_groups: dict[tuple[str, int], list[int]] = {}
    for ei, edge in enumerate(g.edges):
        bu, bv = boxes[edge.source], boxes[edge.target]
        pu, pv = grid_pos.get(edge.source), grid_pos.get(edge.target)
        shared = None
        if pu is not None and pv is not None:
            if pu[1] == pv[1] and pu[0] != pv[0]:
                shared = "row"
            elif pu[0] == pv[0] and pu[1] != pv[1]:
                shared = "col"
        if shared == "row":
            faces = ("right", "left") if pu[0] < pv[0] else ("left", "right")
        elif shared == "col":
            faces = ("bottom", "top") if pu[1] < pv[1] else ("top", "bottom")
        else:
            faces = _pick_faces(bu, bv)
        direct = [face_midpoint(bu, faces[0]), face_midpoint(bv, faces[1])]
        if not offends(direct, edge):
            plans.append(_Plan(edge, "direct", faces, direct))
        elif shared == "row":
            plan = _Plan(edge, "bypass-row", ("top", "top"))
            plans.append(plan)
            bypass_groups.setdefault(("row", pu[1]), []).append(ei)
        elif shared == "col":
            plan = _Plan(edge, "bypass-col", ("right", "right"))
            plans.append(plan)
            bypass_groups.setdefault(("col", pu[0]), []).append(ei)
        else:
            plans.append(_Plan(edge, "grid", faces))

    for (axis, band), members in bypass_groups.items():
        intervals = []
        for ei in members:
            bu = boxes[plans[ei].edge.source]
            bv = boxes[plans[ei].edge.target]
            if axis == "row":
                intervals.append((min(bu.xmin, bv.xmin), max(bu.xmax, bv.xmax)))
            else:
                intervals.append((min(bu.ymin, bv.ymin), max(bu.ymax, bv.ymax)))
        levels = separate_levels(intervals)
        for ei, level in zip(members, levels):
            plan = plans[ei]
            bu = boxes[plan.edge.source]
            bv = boxes[plan.edge.target]
            plan.level = level
            if axis == "row":
                band_top = row_top[band]
                plan.margin = int(min(bu.ymin, bv.ymin)) - band_top + base_margin * (
                    level + 1
                )
                start = face_midpoint(bu, "top")
                end = face_midpoint(bv, "top")
            else:
                band_right = col_right[band]
                plan.margin = band_right - int(max(bu.xmax, bv.xmax)) + base_margin * (
                    level + 1
                )
                start = face_midpoint(bu, "right")
                end = face_midpoint(bv, "right")
            plan.points = bypass_route(start, end, axis, plan.margin)
            if offends(plan.points, plan.edge):
                plan.kind = "grid"
                plan.faces = _pick_faces(bu, bv)
                plan.points = []

    for plan in plans:
        if plan.kind != "grid":
            continue
        bu, bv = boxes[plan.edge.source], boxes[plan.edge.target]
        routed = _grid_route(bu, bv, obstacle_rects, pitch, margin_cells)
        if routed is None:
            plan.kind = "fallback"
            plan.points = [face_midpoint(bu, plan.faces[0]), face_midpoint(bv, plan.faces[1])]
            diagnostics.append(
                f"no grid path for edge {plan.edge.source}->{plan.edge.target}; drawn direct"
            )
        else:
            plan.grid, plan.points, plan.faces, plan.cells = routed

    usage: dict[tuple[NodeId, str], list[tuple[int, int]]] = {}
    for ei, plan in enumerate(plans):
        usage.setdefault((plan.edge.source, plan.faces[0]), []).append((ei, 0))
        usage.setdefault((plan.edge.target, plan.faces[1]), []).append((ei, 1))
    for (node, face), entries in usage.items():
        far = []
        for ei, end in entries:
            other = plans[ei].edge.target if end == 0 else plans[ei].edge.source
            ob = boxes[other]
            if face in ("top", "bottom"):
                coord = (ob.xmin + ob.xmax) / 2
            else:
                coord = (ob.ymin + ob.ymax) / 2
            far.append((coord, ei))
        anchors = assign_side_anchors(boxes[node], face, far)
        for (ei, end), anchor in zip(entries, anchors):
            plans[ei].anchors[end] = anchor

    for plan in plans:
        a_s, a_t = plan.anchors
        assert a_s is not None and a_t is not None
        bu, bv = boxes[plan.edge.source], boxes[plan.edge.target]
        if plan.kind in ("direct", "fallback"):
            plan.points = [a_s, a_t]
        elif plan.kind == "bypass-row":
            plan.points = bypass_route(a_s, a_t, "row", plan.margin)
        elif plan.kind == "bypass-col":
            plan.points = bypass_route(a_s, a_t, "col", plan.margin)
        else:
            assert plan.grid is not None
            plan.points = _assemble(
                plan.grid, bu, bv, plan.faces[0], plan.faces[1], plan.cells, a_s, a_t
            )

    for plan in plans:
        if plan.kind == "fallback" or not offends(plan.points, plan.edge):
            continue
        bu, bv = boxes[plan.edge.source], boxes[plan.edge.target]
        a_s, a_t = plan.anchors
        fixed = _grid_route_fixed(
            bu, bv, obstacle_rects, plan.faces, (a_s, a_t), pitch, margin_cells
        )
        if fixed is not None:
            plan.grid, plan.points, plan.cells = fixed
            plan.kind = "grid"
        if offends(plan.points, plan.edge):
            diagnostics.append(
                f"edge {plan.edge.source}->{plan.edge.target} still overlaps a node box"
            )

    routed_edges = []
    for plan in plans:
        pts = simplify(plan.points)
        routed_edges.append(
            RoutedEdge(
                edge=plan.edge,
                points=pts,
                bends=count_bends(pts),
                level=plan.level,
                kind=plan.kind,
                faces=plan.faces,
            )
        )
    return routed_edges, diagnostics


def assign_side_anchors(
    box: Rect, face: str, far_coords: list[tuple[float, int]]
) -> list[Point]:
    """Evenly spaced anchors along one face, ordered by far-endpoint
    coordinate (ties by the attached index); one edge gets the midpoint.

    far_coords holds (far endpoint coordinate along the face axis,
    tiebreak index) per incident edge, in caller order; the returned
    anchors align with that order.
    """
    n = len(far_coords)
    if n == 0:
        return []
    order = sorted(range(n), key=lambda k: (far_coords[k][0], far_coords[k][1]))
    if face in ("top", "bottom"):
        start, length = box.xmin, box.xmax - box.xmin
        fixed = box.ymin if face == "top" else box.ymax
    else:
        start, length = box.ymin, box.ymax - box.ymin
        fixed = box.xmin if face == "left" else box.xmax
    anchors: list[Point | None] = [None] * n
    for slot, k in enumerate(order):
        offset = int(round(start + (slot + 1) * length / (n + 1)))
        if face in ("top", "bottom"):
            anchors[k] = (offset, int(fixed))
        else:
            anchors[k] = (int(fixed), offset)
    return anchors  # type: ignore[return-value]
