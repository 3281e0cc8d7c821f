from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pathlay._kernels import warmup

SAMPLES = Path(__file__).parent.parent / "samples"


def sample_texts(name: str) -> tuple[str, str, str | None]:
    base = SAMPLES / name
    groups = base / "groups.tsv"
    return (
        (base / "nodes.tsv").read_text(),
        (base / "edges.tsv").read_text(),
        groups.read_text() if groups.exists() else None,
    )


def load_sample(name: str):
    from pathlay.ingest import parse_edge_file, parse_group_file, parse_node_file
    from pathlay.model import build_graph

    nodes_text, edges_text, groups_text = sample_texts(name)
    return build_graph(
        parse_node_file(nodes_text),
        parse_edge_file(edges_text),
        parse_group_file(groups_text) if groups_text else [],
    )


def sample_names() -> list[str]:
    return sorted(p.name for p in SAMPLES.iterdir() if (p / "nodes.tsv").exists())


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    warmup()
