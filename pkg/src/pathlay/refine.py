"""Coordinate-adjustment passes iterated to a fixpoint.

Four passes run per iteration: alignment toward neighbor rows/columns,
directional dragging of taut links, trial-based crossing reduction, and
group column constraints. Every pass keeps the one-node-per-cell
invariant and the causal ordering col(u) < col(v) of retained edges, and
the fixpoint driver returns the best state seen so neither the crossing
count nor the summed edge length ever ends up above its input value.
"""

from __future__ import annotations

import math
from enum import Enum

from .geometry import Segment, count_crossings
from .layering import LayoutState, retained_edges
from .model import Graph, GroupPolicy, NodeId, undirected_adjacency, undirected_edge_pairs

NEIGHBOR_WINDOW_MARGIN = 1
DEFAULT_ITERATION_CAP = 20


class ConflictingGroups(Exception):
    """Two groups claim the same exclusive column."""


class Direction(str, Enum):
    POS_X = "+x"
    NEG_X = "-x"
    POS_Y = "+y"
    NEG_Y = "-y"


def grid_segments(
    g: Graph, s: LayoutState
) -> tuple[list[Segment], list[tuple[NodeId, NodeId]]]:
    """Straight-line segments of the deduplicated undirected edge set."""
    segments = []
    pairs = []
    for u, v in undirected_edge_pairs(g):
        if u not in s.positions or v not in s.positions:
            continue
        pu, pv = s.positions[u], s.positions[v]
        segments.append(Segment((float(pu[0]), float(pu[1])), (float(pv[0]), float(pv[1]))))
        pairs.append((u, v))
    return segments, pairs


def grid_crossings(g: Graph, s: LayoutState) -> tuple[int, list[int]]:
    segments, pairs = grid_segments(g, s)
    return count_crossings(segments, pairs)


def grid_edge_length(g: Graph, s: LayoutState) -> int:
    """Manhattan length sum over the deduplicated undirected edges."""
    total = 0
    for u, v in undirected_edge_pairs(g):
        if u not in s.positions or v not in s.positions:
            continue
        (cu, ru), (cv, rv) = s.positions[u], s.positions[v]
        total += abs(cu - cv) + abs(ru - rv)
    return total


def _group_claims(g: Graph, s: LayoutState) -> tuple[dict[NodeId, int], set[int]]:
    """Pinned member columns and claimed columns, once a group is aligned."""
    pinned: dict[NodeId, int] = {}
    claimed: set[int] = set()
    for group in g.groups:
        cols = {s.positions[m][0] for m in group.members}
        if len(cols) == 1:
            col = cols.pop()
            claimed.add(col)
            for m in group.members:
                pinned[m] = col
    return pinned, claimed


def _input_order(g: Graph) -> dict[NodeId, int]:
    return {n.id: i for i, n in enumerate(g.nodes)}


def _retained_by_node(
    g: Graph,
) -> tuple[dict[NodeId, list[NodeId]], dict[NodeId, list[NodeId]]]:
    outs: dict[NodeId, list[NodeId]] = {n.id: [] for n in g.nodes}
    ins: dict[NodeId, list[NodeId]] = {n.id: [] for n in g.nodes}
    for u, v in retained_edges(g):
        outs[u].append(v)
        ins[v].append(u)
    return outs, ins


def _col_order_ok(
    node: NodeId,
    new_col: int,
    positions: dict[NodeId, tuple[int, int]],
    outs: dict[NodeId, list[NodeId]],
    ins: dict[NodeId, list[NodeId]],
) -> bool:
    for w in outs[node]:
        if not new_col < positions[w][0]:
            return False
    for w in ins[node]:
        if not positions[w][0] < new_col:
            return False
    return True


def _length_delta(
    node: NodeId,
    new_pos: tuple[int, int],
    positions: dict[NodeId, tuple[int, int]],
    neighbors: list[NodeId],
) -> int:
    old = positions[node]
    delta = 0
    for w in neighbors:
        pw = positions[w]
        delta += abs(new_pos[0] - pw[0]) + abs(new_pos[1] - pw[1])
        delta -= abs(old[0] - pw[0]) + abs(old[1] - pw[1])
    return delta


def alignment_candidates(
    g: Graph, s: LayoutState, node: NodeId
) -> list[tuple[int, int]]:
    """Candidate cells for one node, original position first.

    Degree 1 gets the three mirrored/projected cells next to its
    neighbor, degree 2 keeps its column and offers both neighbor rows,
    higher degrees offer the neighbor row with the minimal row change.
    """
    adj = undirected_adjacency(g)
    order = _input_order(g)
    neighbors = sorted(adj[node], key=lambda x: order[x])
    x1, y1 = s.positions[node]
    if not neighbors:
        return [(x1, y1)]
    if len(neighbors) == 1:
        x2, y2 = s.positions[neighbors[0]]
        dy = abs(y1 - y2)
        raw = [(x1, y1), (x2, y2 + dy), (x2, y2 - dy), (x1, y2)]
    elif len(neighbors) == 2:
        (_, y2), (_, y3) = s.positions[neighbors[0]], s.positions[neighbors[1]]
        raw = [(x1, y1), (x1, y2), (x1, y3)]
    else:
        rows = sorted(
            {s.positions[w][1] for w in neighbors}, key=lambda r: (abs(r - y1), r)
        )
        raw = [(x1, y1), (x1, rows[0])]
    seen: set[tuple[int, int]] = set()
    out = []
    for cand in raw:
        if cand in seen or cand[1] < 0:
            continue
        seen.add(cand)
        out.append(cand)
    return out


def _neighbor_population(
    g: Graph, s: LayoutState, node: NodeId, neighbors: list[NodeId]
) -> list[tuple[int, int]]:
    """Cells of nodes inside the window spanned by secondary adjacents."""
    adj = undirected_adjacency(g)
    secondary: set[NodeId] = set()
    for w in neighbors:
        secondary.update(x for x in adj[w] if x != node)
    if not secondary:
        return []
    cols = [s.positions[x][0] for x in secondary]
    rows = [s.positions[x][1] for x in secondary]
    lo_c, hi_c = min(cols) - NEIGHBOR_WINDOW_MARGIN, max(cols) + NEIGHBOR_WINDOW_MARGIN
    lo_r, hi_r = min(rows) - NEIGHBOR_WINDOW_MARGIN, max(rows) + NEIGHBOR_WINDOW_MARGIN
    population = []
    for other, (c, r) in s.positions.items():
        if other == node:
            continue
        if lo_c <= c <= hi_c and lo_r <= r <= hi_r:
            population.append((c, r))
    return population


def align_pass(g: Graph, s: LayoutState) -> LayoutState:
    """Offer each node its degree-based alternatives and take the one
    farthest (Chebyshev) from the surrounding neighbor nodes."""
    adj = undirected_adjacency(g)
    order = _input_order(g)
    outs, ins = _retained_by_node(g)
    pinned, claimed = _group_claims(g, s)
    positions = dict(s.positions)
    occupied = {pos: node for node, pos in positions.items()}

    for gnode in g.nodes:
        node = gnode.id
        neighbors = sorted(adj[node], key=lambda x: order[x])
        if not neighbors:
            continue
        here = positions[node]
        state_view = LayoutState(positions, s.col_count, s.row_count)
        candidates = alignment_candidates(g, state_view, node)
        valid = []
        for cand in candidates:
            if cand == here:
                valid.append(cand)
                continue
            if cand in occupied:
                continue
            if cand[0] != here[0]:
                if node in pinned:
                    continue
                if cand[0] in claimed:
                    continue
                if not _col_order_ok(node, cand[0], positions, outs, ins):
                    continue
            if _length_delta(node, cand, positions, neighbors) > 0:
                continue
            valid.append(cand)
        if len(valid) <= 1:
            continue
        if len(neighbors) > 2:
            chosen = next((c for c in valid if c != here), here)
        else:
            population = _neighbor_population(g, state_view, node, neighbors)
            if not population:
                continue
            best_score = None
            chosen = here
            for cand in valid:
                score = min(
                    max(abs(cand[0] - c), abs(cand[1] - r)) for c, r in population
                )
                if best_score is None or score > best_score:
                    best_score = score
                    chosen = cand
        if chosen != here:
            del occupied[here]
            occupied[chosen] = node
            positions[node] = chosen
    return LayoutState.from_positions(positions)


def _drag_groups(
    g: Graph, positions: dict[NodeId, tuple[int, int]], axis: int, movable: set[NodeId]
) -> list[list[NodeId]]:
    """Components of graph-adjacent nodes sharing the drag-axis
    coordinate (same column for x drags, same row for y drags); aligned
    adjacent nodes stay aligned by moving as single units."""
    adj = undirected_adjacency(g)
    order = _input_order(g)
    seen: set[NodeId] = set()
    groups = []
    for gnode in g.nodes:
        node = gnode.id
        if node in seen or node not in movable:
            continue
        comp = [node]
        seen.add(node)
        stack = [node]
        while stack:
            u = stack.pop()
            for w in sorted(adj[u], key=lambda x: order[x]):
                if (
                    w not in seen
                    and w in movable
                    and positions[w][axis] == positions[u][axis]
                ):
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comp.sort(key=lambda x: order[x])
        groups.append(comp)
    return groups


def drag_pass(g: Graph, s: LayoutState, direction: Direction) -> LayoutState:
    """Pull groups toward the given direction by their averaged tension.

    A link is taut when its coordinate difference toward the direction
    exceeds one; a group moves one cell at a time, at most ceil(mean
    taut slack) steps, stopping at obstacles, claimed columns, causal
    ordering limits, and any step that would grow the summed length.
    """
    axis = 0 if direction in (Direction.POS_X, Direction.NEG_X) else 1
    sign = 1 if direction in (Direction.POS_X, Direction.POS_Y) else -1
    adj = undirected_adjacency(g)
    order = _input_order(g)
    outs, ins = _retained_by_node(g)
    pinned, claimed = _group_claims(g, s)
    positions = dict(s.positions)
    occupied = {pos: node for node, pos in positions.items()}

    movable = {n.id for n in g.nodes}
    if axis == 0:
        movable -= set(pinned)
    groups = _drag_groups(g, positions, axis, movable)
    groups.sort(
        key=lambda comp: (-sign * positions[comp[0]][axis], order[comp[0]])
    )

    for comp in groups:
        members = set(comp)
        tensions = []
        for u in comp:
            for w in adj[u]:
                if w in members:
                    continue
                diff = (positions[w][axis] - positions[u][axis]) * sign
                if diff > 1:
                    tensions.append(diff - 1)
        if not tensions:
            continue
        budget = math.ceil(sum(tensions) / len(tensions))
        for _ in range(budget):
            moves = {}
            ok = True
            for u in comp:
                pos = positions[u]
                nxt = (pos[0] + sign, pos[1]) if axis == 0 else (pos[0], pos[1] + sign)
                if nxt[axis] < 0:
                    ok = False
                    break
                holder = occupied.get(nxt)
                if holder is not None and holder not in members:
                    ok = False
                    break
                if axis == 0:
                    if nxt[0] in claimed:
                        ok = False
                        break
                    if not _col_order_ok_external(
                        u, nxt[0], positions, outs, ins, members
                    ):
                        ok = False
                        break
                moves[u] = nxt
            if not ok:
                break
            delta = 0
            for u in comp:
                for w in adj[u]:
                    if w in members:
                        continue
                    delta += abs(moves[u][axis] - positions[w][axis])
                    delta -= abs(positions[u][axis] - positions[w][axis])
            if delta > 0:
                break
            for u in comp:
                del occupied[positions[u]]
            for u in comp:
                positions[u] = moves[u]
                occupied[moves[u]] = u
    return LayoutState.from_positions(positions)


def _col_order_ok_external(
    node: NodeId,
    new_col: int,
    positions: dict[NodeId, tuple[int, int]],
    outs: dict[NodeId, list[NodeId]],
    ins: dict[NodeId, list[NodeId]],
    members: set[NodeId],
) -> bool:
    for w in outs[node]:
        if w not in members and not new_col < positions[w][0]:
            return False
    for w in ins[node]:
        if w not in members and not positions[w][0] < new_col:
            return False
    return True


def _apply_row_move(
    positions: dict[NodeId, tuple[int, int]],
    node: NodeId,
    new_row: int,
) -> dict[NodeId, tuple[int, int]] | None:
    """Move a node within its column; nodes between the old and new row
    rotate one cell toward the vacated position, keeping cells unique."""
    col, old_row = positions[node]
    if new_row == old_row or new_row < 0:
        return None
    out = dict(positions)
    if new_row > old_row:
        lo, hi, shift = old_row + 1, new_row, -1
    else:
        lo, hi, shift = new_row, old_row - 1, 1
    for other, (c, r) in positions.items():
        if other != node and c == col and lo <= r <= hi:
            out[other] = (c, r + shift)
    out[node] = (col, new_row)
    return out


def reduce_crossings_pass(g: Graph, s: LayoutState) -> tuple[LayoutState, int]:
    """Trial the six row alternatives per endpoint of each crossing edge,
    committing only strictly improving moves, until nothing improves."""
    positions = dict(s.positions)
    pairs = undirected_edge_pairs(g)

    def total_for(pos: dict[NodeId, tuple[int, int]]) -> int:
        segs = [
            Segment(
                (float(pos[u][0]), float(pos[u][1])),
                (float(pos[v][0]), float(pos[v][1])),
            )
            for u, v in pairs
        ]
        return count_crossings(segs, pairs)[0]

    current = total_for(positions)
    improved = True
    while improved and current > 0:
        improved = False
        per_edge = grid_crossings(g, LayoutState.from_positions(positions))[1]
        order = sorted(range(len(pairs)), key=lambda i: (-per_edge[i], i))
        for ei in order:
            u, v = pairs[ei]
            (_, y1), (_, y2) = positions[u], positions[v]
            trials = [
                (u, y2),
                (u, y2 - 1),
                (u, y2 + 1),
                (v, y1),
                (v, y1 - 1),
                (v, y1 + 1),
            ]
            best_total = current
            best_positions = None
            for node, new_row in trials:
                moved = _apply_row_move(positions, node, new_row)
                if moved is None:
                    continue
                t = total_for(moved)
                if t < best_total:
                    best_total = t
                    best_positions = moved
            if best_positions is not None:
                positions = best_positions
                current = best_total
                improved = True
    return LayoutState.from_positions(positions), current


def _free_row_in_col(
    occupied: dict[tuple[int, int], NodeId], col: int, preferred: int
) -> int:
    row = preferred
    while (col, row) in occupied:
        row += 1
    return row


def _move_node(
    positions: dict[NodeId, tuple[int, int]],
    occupied: dict[tuple[int, int], NodeId],
    node: NodeId,
    col: int,
) -> None:
    old = positions[node]
    row = _free_row_in_col(occupied, col, old[1])
    del occupied[old]
    positions[node] = (col, row)
    occupied[(col, row)] = node


def apply_groups(g: Graph, s: LayoutState) -> LayoutState:
    """Force each group onto one exclusive column per its policy.

    foremost -> column 0 (everything else shifts right), last -> a fresh
    rightmost column, voting -> the members' most common column with
    previous occupants evicted sideways by their neighbors' majority.
    """
    if not g.groups:
        return s.copy()
    order = _input_order(g)
    adj = undirected_adjacency(g)
    positions = dict(s.positions)
    claimed: dict[int, int] = {}
    policy_taken: set[GroupPolicy] = set()

    for gi, group in enumerate(g.groups):
        members = sorted(group.members, key=lambda x: order[x])
        occupied = {pos: node for node, pos in positions.items()}
        member_cols = [positions[m][0] for m in members]

        if group.policy is GroupPolicy.FOREMOST:
            if GroupPolicy.FOREMOST in policy_taken:
                raise ConflictingGroups("two foremost groups")
            policy_taken.add(GroupPolicy.FOREMOST)
            already = all(c == 0 for c in member_cols) and all(
                node in group.members
                for (c, _), node in occupied.items()
                if c == 0
            )
            if not already:
                for node, (c, r) in positions.items():
                    if node not in group.members:
                        positions[node] = (c + 1, r)
                claimed = {c + 1: i for c, i in claimed.items()}
                occupied = {pos: node for node, pos in positions.items()}
                for m in members:
                    _move_node(positions, occupied, m, 0)
            target = 0

        elif group.policy is GroupPolicy.LAST:
            if GroupPolicy.LAST in policy_taken:
                raise ConflictingGroups("two last groups")
            policy_taken.add(GroupPolicy.LAST)
            max_col = max(c for c, _ in positions.values())
            already = all(c == max_col for c in member_cols) and all(
                node in group.members
                for (c, _), node in occupied.items()
                if c == max_col
            )
            if already:
                target = max_col
            else:
                target = max_col + 1
                for m in members:
                    _move_node(positions, occupied, m, target)

        else:  # voting
            counts: dict[int, int] = {}
            for c in member_cols:
                counts[c] = counts.get(c, 0) + 1
            best = max(counts.values())
            target = min(c for c, k in counts.items() if k == best)
            if target in claimed:
                raise ConflictingGroups(
                    f"voting group wants already-claimed column {target}"
                )
            evicted = [
                node
                for (c, _), node in sorted(
                    occupied.items(), key=lambda kv: (kv[0][1], order[kv[1]])
                )
                if c == target and node not in group.members
            ]
            for node in evicted:
                c, _ = positions[node]
                left = sum(1 for w in adj[node] if positions[w][0] < c)
                right = sum(1 for w in adj[node] if positions[w][0] > c)
                direction = -1 if left > right else 1
                dest = None
                for delta in range(1, len(positions) + 2):
                    for cand in (c + direction * delta, c - direction * delta):
                        if cand >= 0 and cand not in claimed and cand != target:
                            dest = cand
                            break
                    if dest is not None:
                        break
                assert dest is not None
                _move_node(positions, occupied, node, dest)
            for m in members:
                _move_node(positions, occupied, m, target)

        if target in claimed and claimed[target] != gi:
            raise ConflictingGroups(f"column {target} claimed twice")
        claimed[target] = gi

    return LayoutState.from_positions(positions)


def _dominates(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[0] and a[1] <= b[1] and a != b


def refine_fixpoint(
    g: Graph, s: LayoutState, cap: int = DEFAULT_ITERATION_CAP
) -> LayoutState:
    """align -> drag (all four directions) -> reduce crossings -> groups,
    repeated while either metric strictly improves, up to ``cap`` times.

    Returns the best state seen (fewest crossings, then shortest), so the
    result is never worse than the input in either metric. When groups
    exist the input itself is not a candidate: group columns must hold.
    """
    state = s.copy()
    prev = (grid_crossings(g, state)[0], grid_edge_length(g, state))
    best: tuple[tuple[int, int], LayoutState] | None = None
    if not g.groups:
        best = (prev, state.copy())
    for _ in range(cap):
        state = align_pass(g, state)
        for direction in (
            Direction.POS_X,
            Direction.NEG_X,
            Direction.POS_Y,
            Direction.NEG_Y,
        ):
            state = drag_pass(g, state, direction)
        state, _ = reduce_crossings_pass(g, state)
        state = apply_groups(g, state)
        cur = (grid_crossings(g, state)[0], grid_edge_length(g, state))
        if best is None or _dominates(cur, best[0]):
            best = (cur, state.copy())
        if not (cur[0] < prev[0] or cur[1] < prev[1]):
            break
        prev = cur
    assert best is not None
    return best[1]
