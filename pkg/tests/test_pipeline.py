from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import SAMPLES, load_sample
from corpus import graph_from
from pathlay.layering import LayoutState
from pathlay.model import NodeId
from pathlay.pipeline import (
    PipelineConfig,
    compute_metrics,
    config_from_file,
    initial_layout,
    random_layout,
    run_pipeline,
)


def state_of(mapping) -> LayoutState:
    return LayoutState.from_positions({NodeId(k): v for k, v in mapping.items()})


class TestRandomLayout:
    def test_deterministic_per_seed(self):
        g = load_sample("egfr")
        assert random_layout(g, 5).positions == random_layout(g, 5).positions

    def test_four_nodes_fill_2x2(self):
        g = graph_from(4, [])
        s = random_layout(g, 1)
        assert sorted(s.positions.values()) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_different_seeds_differ(self):
        g = graph_from(10, [])
        assert random_layout(g, 1).positions != random_layout(g, 2).positions


class TestComputeMetrics:
    def test_chain(self):
        g = graph_from(3, [(1, 2), (2, 3)])
        s = state_of({"1": (0, 0), "2": (1, 0), "3": (2, 0)})
        m = compute_metrics(g, s, "stage2")
        assert (m.crossings, m.edge_length_sum) == (0, 2.0)

    def test_two_crossing_edges(self):
        g = graph_from(4, [(1, 4), (2, 3)])
        s = state_of({"1": (0, 0), "2": (0, 1), "3": (1, 0), "4": (1, 1)})
        assert compute_metrics(g, s, "stage1").crossings == 1

    def test_diamond_hand_sum(self):
        g = graph_from(4, [(1, 2), (1, 3), (2, 4), (3, 4)])
        s = state_of({"1": (0, 0), "2": (1, 0), "3": (1, 1), "4": (2, 0)})
        # |1-2|=1, |1-3|=2, |2-4|=1, |3-4|=2
        assert compute_metrics(g, s, "stage3").edge_length_sum == 6.0


class TestInitialLayout:
    def test_chain_columns_follow_depth(self):
        g = graph_from(3, [(1, 2), (2, 3)])
        s = initial_layout(g)
        assert [s.positions[NodeId(i)][0] for i in "123"] == [0, 1, 2]

    def test_disconnected_components_stack_with_gap(self):
        g = load_sample("forked")
        s = initial_layout(g)
        rows_a = {s.positions[NodeId(i)][1] for i in "123"}
        rows_b = {s.positions[NodeId(i)][1] for i in "4567"}
        assert max(rows_a) + 1 < min(rows_b)

    def test_containers_not_placed(self):
        g = load_sample("complexes")
        s = initial_layout(g)
        assert NodeId("2") not in s.positions
        assert NodeId("2.1") in s.positions

    def test_group_naming_container_is_filtered_to_placed_members(self):
        from pathlay.ingest import parse_edge_file, parse_group_file, parse_node_file
        from pathlay.model import build_graph

        nodes = parse_node_file(
            "1\trectangle\tA\twhite\tblack\n"
            "2\trectangle\tBox\twhite\tblack\n"
            "2.1\trectangle\tB\twhite\tblack\n"
        )
        edges = parse_edge_file("1\t2.1\tsolid\tsolid-arrow\t\tnone\n")
        groups = parse_group_file("foremost\t2\t1\n")
        g = build_graph(nodes, edges, groups)
        result = run_pipeline(g, PipelineConfig(seed=1))
        assert result.metrics[-1].stage == "stage3"

    def test_stage1_render_of_large_random_layout(self):
        from corpus import random_connected_dag

        g = random_connected_dag(9, n_lo=30, n_hi=40)
        result = run_pipeline(g, PipelineConfig(seed=9, stop_after="stage1"))
        assert "<svg" in result.svg


class TestRunPipeline:
    def test_three_stage_metrics(self):
        g = load_sample("egfr")
        result = run_pipeline(g, PipelineConfig(seed=7))
        stages = [m.stage for m in result.metrics]
        assert stages == ["stage1", "stage2", "stage3"]
        assert result.metrics[2].crossings <= result.metrics[1].crossings
        assert result.svg.startswith("<?xml")
        assert result.diagnostics == []

    def test_stop_after_stage2_skips_refinement(self):
        g = load_sample("egfr")
        result = run_pipeline(g, PipelineConfig(seed=7, stop_after="stage2"))
        assert [m.stage for m in result.metrics] == ["stage1", "stage2"]

    def test_stop_after_stage1_renders_random_layout(self):
        g = load_sample("minimal")
        result = run_pipeline(g, PipelineConfig(seed=7, stop_after="stage1"))
        assert [m.stage for m in result.metrics] == ["stage1"]
        assert "<svg" in result.svg

    def test_end_to_end_determinism(self):
        g = load_sample("egfr")
        a = run_pipeline(g, PipelineConfig(seed=11))
        b = run_pipeline(g, PipelineConfig(seed=11))
        assert a.svg == b.svg
        assert a.metrics_json() == b.metrics_json()

    def test_metrics_json_schema(self):
        g = load_sample("minimal")
        doc = json.loads(run_pipeline(g, PipelineConfig()).metrics_json())
        assert set(doc) == {"stages"}
        for row in doc["stages"]:
            assert set(row) == {"stage", "crossings", "edge_length_sum"}

    def test_geometry_sidecar_schema(self):
        g = load_sample("minimal")
        geo = run_pipeline(g, PipelineConfig()).geometry
        assert set(geo) == {"nodes", "edges"}
        for entry in geo["nodes"].values():
            assert set(entry) == {"x", "y", "w", "h"}
        for entry in geo["edges"]:
            assert set(entry) == {"source", "target", "points"}
            assert len(entry["points"]) >= 2


class TestConfigFile:
    def test_overrides(self):
        cfg = config_from_file("seed = 9\ngutter = 30\n# comment\nstop_after = stage2\n")
        assert (cfg.seed, cfg.gutter, cfg.stop_after) == (9, 30, "stage2")

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            config_from_file("mystery = 1\n")

    def test_bad_line_rejected(self):
        with pytest.raises(ValueError):
            config_from_file("just words\n")


class TestCli:
    def _run(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "pathlay.cli", *args],
            capture_output=True,
            text=True,
        )

    def test_success_run(self, tmp_path):
        out = tmp_path / "out.svg"
        metrics = tmp_path / "metrics.json"
        proc = self._run(
            "--nodes", str(SAMPLES / "minimal" / "nodes.tsv"),
            "--edges", str(SAMPLES / "minimal" / "edges.tsv"),
            "--out", str(out),
            "--metrics", str(metrics),
            "--seed", "4",
        )
        assert proc.returncode == 0, proc.stderr
        assert out.read_text().startswith("<?xml")
        assert "stage3" in proc.stdout
        assert json.loads(metrics.read_text())["stages"][0]["stage"] == "stage1"

    def test_malformed_edge_file_exits_2_with_location(self, tmp_path):
        bad = tmp_path / "edges.tsv"
        bad.write_text("1\t2\tsolid\tsolid-arrow\tnone\n")  # five fields
        proc = self._run(
            "--nodes", str(SAMPLES / "minimal" / "nodes.tsv"),
            "--edges", str(bad),
            "--out", str(tmp_path / "o.svg"),
        )
        assert proc.returncode == 2
        assert "edges.tsv" in proc.stderr
        assert "line 1" in proc.stderr

    def test_missing_file_exits_2(self, tmp_path):
        proc = self._run(
            "--nodes", "/nonexistent/nodes.tsv",
            "--edges", str(SAMPLES / "minimal" / "edges.tsv"),
            "--out", str(tmp_path / "o.svg"),
        )
        assert proc.returncode == 2

    def test_groups_and_stop_after(self, tmp_path):
        proc = self._run(
            "--nodes", str(SAMPLES / "egfr" / "nodes.tsv"),
            "--edges", str(SAMPLES / "egfr" / "edges.tsv"),
            "--groups", str(SAMPLES / "egfr" / "groups.tsv"),
            "--out", str(tmp_path / "o.svg"),
            "--stop-after", "stage2",
        )
        assert proc.returncode == 0, proc.stderr
        assert "stage3" not in proc.stdout
