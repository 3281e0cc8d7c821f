"""Exact geometric primitives on real coordinates.

All predicates decide signs via cross products with no epsilon, so they
are exact whenever the inputs are integer-valued (grid or pixel
coordinates). Touching counts as intersecting and containment is
boundary-inclusive, consistently across every caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import edge_cross_counts

Point = tuple[float, float]


class DimensionMismatch(Exception):
    pass


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point

    def __post_init__(self) -> None:
        if self.p == self.q:
            raise ValueError(f"degenerate segment at {self.p}")

    def midpoint(self) -> Point:
        return ((self.p[0] + self.q[0]) / 2, (self.p[1] + self.q[1]) / 2)


@dataclass(frozen=True)
class Rect:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise ValueError("inverted rectangle")

    def corners(self) -> list[Point]:
        return [
            (self.xmin, self.ymin),
            (self.xmax, self.ymin),
            (self.xmax, self.ymax),
            (self.xmin, self.ymax),
        ]

    def sides(self) -> list[Segment]:
        a, b, c, d = self.corners()
        return [Segment(a, b), Segment(b, c), Segment(c, d), Segment(d, a)]

    def center(self) -> Point:
        return ((self.xmin + self.xmax) / 2, (self.ymin + self.ymax) / 2)


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    """Cross product of (a - o) x (b - o)."""
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def segments_intersect(s1: Segment, s2: Segment) -> bool:
    """True iff the segments share at least one point.

    Bounding-box rejection, then the straddle test in both directions;
    the <= 0 sign products admit collinear touches and shared endpoints.
    """
    (ax, ay), (bx, by) = s1.p, s1.q
    (cx, cy), (dx, dy) = s2.p, s2.q
    if max(ax, bx) < min(cx, dx) or max(cx, dx) < min(ax, bx):
        return False
    if max(ay, by) < min(cy, dy) or max(cy, dy) < min(ay, by):
        return False
    d1 = _cross(ax, ay, bx, by, cx, cy)
    d2 = _cross(ax, ay, bx, by, dx, dy)
    if (d1 > 0 and d2 > 0) or (d1 < 0 and d2 < 0):
        return False
    d3 = _cross(cx, cy, dx, dy, ax, ay)
    d4 = _cross(cx, cy, dx, dy, bx, by)
    if (d3 > 0 and d4 > 0) or (d3 < 0 and d4 < 0):
        return False
    return True


def point_in_rect(p: Point, r: Rect) -> bool:
    """Boundary-inclusive containment via the two cross-product sign pairs.

    With corners A, B, C, D in cyclic order, E is between the AB/CD pair
    and between the DA/BC pair exactly when both sign products are
    non-negative. Zero-area rectangles degenerate the cross products, so
    they fall back to direct interval comparisons.
    """
    if r.xmin == r.xmax or r.ymin == r.ymax:
        return r.xmin <= p[0] <= r.xmax and r.ymin <= p[1] <= r.ymax
    a, b, c, d = r.corners()
    ex, ey = p
    ab_ae = _cross(a[0], a[1], b[0], b[1], ex, ey)
    cd_ce = _cross(c[0], c[1], d[0], d[1], ex, ey)
    if ab_ae * cd_ce < 0:
        return False
    da_de = _cross(d[0], d[1], a[0], a[1], ex, ey)
    bc_be = _cross(b[0], b[1], c[0], c[1], ex, ey)
    if da_de * bc_be < 0:
        return False
    return True


def count_crossings(
    segments: list[Segment],
    endpoint_ids: list[tuple[object, object]] | None = None,
) -> tuple[int, list[int]]:
    """Crossing pairs among segments, with per-segment counts.

    Pairs whose corresponding graph edges share an endpoint id are
    exempt. Returns (total unordered crossing pairs, per-edge counts).
    """
    m = len(segments)
    if endpoint_ids is not None and len(endpoint_ids) != m:
        raise DimensionMismatch("one endpoint pair per segment required")
    if m == 0:
        return 0, []
    segs = np.array(
        [[s.p[0], s.p[1], s.q[0], s.q[1]] for s in segments], dtype=np.float64
    )
    if endpoint_ids is None:
        ends = np.arange(2 * m, dtype=np.int64).reshape(m, 2)
    else:
        key: dict[object, int] = {}
        rows = []
        for a, b in endpoint_ids:
            rows.append([key.setdefault(a, len(key)), key.setdefault(b, len(key))])
        ends = np.array(rows, dtype=np.int64)
    counts = edge_cross_counts(segs, ends)
    return int(counts.sum()) // 2, [int(c) for c in counts]


def segment_intersects_rect(seg: Segment, box: Rect) -> bool:
    """True iff the segment touches a side of the box or runs inside it."""
    for side in box.sides():
        if segments_intersect(seg, side):
            return True
    return point_in_rect(seg.midpoint(), box)


def edge_node_overlaps(
    segments: list[Segment],
    boxes: list[Rect],
    exempt: set[int] = frozenset(),
) -> list[tuple[int, int]]:
    """Offending (segment index, box index) pairs.

    A pair offends when the segment intersects any of the box's four
    sides or lies inside the box (midpoint test catches containment);
    boxes listed in ``exempt`` are the segment endpoints' own nodes.
    """
    offenses = []
    for i, seg in enumerate(segments):
        for j, box in enumerate(boxes):
            if j in exempt:
                continue
            if segment_intersects_rect(seg, box):
                offenses.append((i, j))
    return offenses
