"""Stage orchestration: random baseline, spectral+topological placement,
refinement, then routing and SVG emission, with per-stage metrics.

stage1 is the random baseline used purely for evaluation, stage2 the
spectral/layered grid, stage3 the refined grid. Metrics are grid-unit
counts (crossings and Manhattan edge length) so they are independent of
label text. Complex containers never occupy a grid cell; they become
enclosure boxes around their members at render time.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace

from .layering import LayoutState, assign_depths, normalize_ranks
from .model import Graph, Group, NodeId, connected_components
from .refine import grid_crossings, grid_edge_length, refine_fixpoint
from .render import (
    CHAR_WIDTH,
    DEFAULT_NODE_LENGTH,
    GUTTER,
    LINE_HEIGHT,
    OUTER_MARGIN,
    PADDING,
    complex_enclosure,
    emit_svg,
    layout_canvas,
    node_box_size,
)
from .route import BASE_BYPASS_MARGIN, GRID_MARGIN_CELLS, GRID_PITCH, route_graph
from .spectral import build_laplacian, spectral_coordinates

STAGES = ("stage1", "stage2", "stage3")


@dataclass(frozen=True)
class StageMetrics:
    stage: str
    crossings: int
    edge_length_sum: float

    def as_dict(self) -> dict:
        return {
            "stage": self.stage,
            "crossings": self.crossings,
            "edge_length_sum": self.edge_length_sum,
        }


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    refine_cap: int = 20
    base_margin: int = BASE_BYPASS_MARGIN
    grid_pitch: int = GRID_PITCH
    grid_margin_cells: int = GRID_MARGIN_CELLS
    char_width: int = CHAR_WIDTH
    line_height: int = LINE_HEIGHT
    padding: int = PADDING
    default_node_length: int = DEFAULT_NODE_LENGTH
    gutter: int = GUTTER
    outer_margin: int = OUTER_MARGIN
    stop_after: str = "stage3"


@dataclass
class PipelineResult:
    svg: str
    metrics: list[StageMetrics]
    geometry: dict
    diagnostics: list[str] = field(default_factory=list)

    def metrics_json(self) -> str:
        doc = {"stages": [m.as_dict() for m in self.metrics]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"{'stage':<8} {'crossings':>10} {'edge_length_sum':>16}"]
        for m in self.metrics:
            lines.append(f"{m.stage:<8} {m.crossings:>10} {m.edge_length_sum:>16g}")
        return "\n".join(lines)


def placed_node_ids(g: Graph) -> list[NodeId]:
    """Nodes that occupy grid cells: everything but complex containers."""
    containers = set(g.containers())
    return [n.id for n in g.nodes if n.id not in containers]


def _placed_subgraph(g: Graph) -> Graph:
    """Graph restricted to placed nodes, groups filtered accordingly.

    Built without re-validation: dropping containers would orphan the
    complex members the validator checks for.
    """
    keep = set(placed_node_ids(g))
    nodes = tuple(n for n in g.nodes if n.id in keep)
    edges = tuple(e for e in g.edges if e.source in keep and e.target in keep)
    groups = []
    for group in g.groups:
        members = frozenset(m for m in group.members if m in keep)
        if members:
            groups.append(Group(members, group.policy))
    index = {n.id: i for i, n in enumerate(nodes)}
    return Graph(nodes, edges, tuple(groups), index)


def random_layout(g: Graph, seed: int) -> LayoutState:
    """Seeded permutation of placed nodes over a ceil(sqrt(n))^2 grid."""
    ids = placed_node_ids(g)
    n = len(ids)
    if n == 0:
        return LayoutState({}, 0, 0)
    side = math.isqrt(n - 1) + 1
    cells = [(c, r) for r in range(side) for c in range(side)]
    rng = random.Random(seed)
    rng.shuffle(cells)
    return LayoutState.from_positions(dict(zip(ids, cells)))


def compute_metrics(g: Graph, s: LayoutState, stage: str) -> StageMetrics:
    """Crossings and Manhattan length over the undirected edge set."""
    return StageMetrics(stage, grid_crossings(g, s)[0], float(grid_edge_length(g, s)))


def _component_subgraph(g: Graph, comp: list[NodeId]) -> Graph:
    keep = set(comp)
    nodes = tuple(n for n in g.nodes if n.id in keep)
    edges = tuple(e for e in g.edges if e.source in keep and e.target in keep)
    index = {n.id: i for i, n in enumerate(nodes)}
    return Graph(nodes, edges, (), index)


def initial_layout(g: Graph) -> LayoutState:
    """stage2 placement: depth columns plus spectral rows, normalized.

    Disconnected graphs are laid out per connected component, the
    components stacked vertically with one empty grid row between.
    """
    placed = _placed_subgraph(g)
    if not placed.nodes:
        return LayoutState({}, 0, 0)
    positions: dict[NodeId, tuple[int, int]] = {}
    row_offset = 0
    for comp in connected_components(placed):
        sub = _component_subgraph(placed, comp)
        coords_v = spectral_coordinates(build_laplacian(sub)).v
        depths = assign_depths(sub)
        coords = {
            node.id: (float(depths[node.id]), float(coords_v[i]))
            for i, node in enumerate(sub.nodes)
        }
        state = normalize_ranks(coords)
        for node_id, (col, row) in state.positions.items():
            positions[node_id] = (col, row + row_offset)
        row_offset += state.row_count + 1
    return LayoutState.from_positions(positions)


def render_stage(g: Graph, s: LayoutState, config: PipelineConfig):
    """Pixel geometry, routing, and SVG for one layout state."""
    sizes = {}
    for node_id in s.positions:
        sizes[node_id] = node_box_size(
            g.node(node_id).label,
            config.default_node_length,
            config.char_width,
            config.line_height,
            config.padding,
        )
    canvas, geoms = layout_canvas(s, sizes, config.gutter, config.outer_margin)
    boxes = {node_id: geom.rect() for node_id, geom in geoms.items()}
    for container in g.containers():
        members = [geoms[m] for m in g.complex_members(container) if m in geoms]
        if members:
            boxes[container] = complex_enclosure(members)
    obstacle_ids = [n for n in placed_node_ids(g) if n in s.positions]
    routed, diagnostics = route_graph(
        g,
        s.positions,
        boxes,
        obstacle_ids,
        base_margin=config.base_margin,
        pitch=config.grid_pitch,
        margin_cells=config.grid_margin_cells,
    )
    svg = emit_svg(
        g,
        geoms,
        routed,
        canvas.width,
        canvas.height,
        line_height=config.line_height,
        padding=config.padding,
    )
    geometry = {
        "nodes": {
            node_id.raw: {
                "x": geom.x,
                "y": geom.y,
                "w": geom.width,
                "h": geom.height,
            }
            for node_id, geom in sorted(geoms.items(), key=lambda kv: kv[0].sort_key())
        },
        "edges": [
            {
                "source": r.edge.source.raw,
                "target": r.edge.target.raw,
                "points": [[int(x), int(y)] for x, y in r.points],
            }
            for r in routed
        ],
    }
    return svg, geometry, routed, geoms, diagnostics


def run_pipeline(g: Graph, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Execute stages up to ``config.stop_after`` and render the result."""
    if config.stop_after not in STAGES:
        raise ValueError(f"unknown stage {config.stop_after!r}")
    metrics = []
    state = random_layout(g, config.seed)
    metrics.append(compute_metrics(g, state, "stage1"))
    if config.stop_after != "stage1":
        state = initial_layout(g)
        metrics.append(compute_metrics(g, state, "stage2"))
    if config.stop_after == "stage3":
        state = refine_fixpoint(_placed_subgraph(g), state, config.refine_cap)
        metrics.append(compute_metrics(g, state, "stage3"))
    svg, geometry, _, _, diagnostics = render_stage(g, state, config)
    return PipelineResult(svg, metrics, geometry, diagnostics)


def config_from_file(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    """Parse a key = value config file into a PipelineConfig."""
    config = base or PipelineConfig()
    updates = {}
    valid = set(PipelineConfig.__dataclass_fields__)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in valid:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key == "stop_after":
            updates[key] = raw
        else:
            updates[key] = int(raw)
    return replace(config, **updates)
