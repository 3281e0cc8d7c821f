"""pathlay: deterministic layout engine for directed pathway diagrams."""

from .model import Edge, Graph, Group, Node, NodeId, build_graph
from .pipeline import PipelineConfig, PipelineResult, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Edge",
    "Graph",
    "Group",
    "Node",
    "NodeId",
    "PipelineConfig",
    "PipelineResult",
    "build_graph",
    "run_pipeline",
    "__version__",
]
