"""Command line entry point.

    pathlay --nodes nodes.tsv --edges edges.tsv [--groups groups.tsv]
            --out out.svg [--metrics out.json] [--geometry geom.json]
            [--seed N] [--stop-after stage1|stage2|stage3] [--config file]

Exit codes: 0 success, 1 internal failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .ingest import ParseError, parse_edge_file, parse_group_file, parse_node_file
from .model import GraphError, build_graph
from .pipeline import PipelineConfig, config_from_file, run_pipeline

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathlay",
        description="Deterministic layout engine for directed pathway diagrams.",
    )
    parser.add_argument("--nodes", required=True, help="node description file (TSV)")
    parser.add_argument("--edges", required=True, help="edge description file (TSV)")
    parser.add_argument("--groups", help="optional group description file (TSV)")
    parser.add_argument("--out", required=True, help="output SVG path")
    parser.add_argument("--metrics", help="write per-stage metrics JSON here")
    parser.add_argument("--geometry", help="write final pixel geometry JSON here")
    parser.add_argument("--seed", type=int, help="seed for the stage1 baseline")
    parser.add_argument(
        "--stop-after",
        choices=["stage1", "stage2", "stage3"],
        help="render the layout as of this stage (default stage3)",
    )
    parser.add_argument("--config", help="key = value configuration file")
    return parser


def _read(path: str) -> str:
    return Path(path).read_bytes().decode("utf-8", errors="replace")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = PipelineConfig()
        if args.config:
            config = config_from_file(_read(args.config), config)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.stop_after:
            config = replace(config, stop_after=args.stop_after)

        try:
            nodes = parse_node_file(_read(args.nodes))
        except ParseError as err:
            print(f"error: {args.nodes}: {err}", file=sys.stderr)
            return EXIT_INPUT
        try:
            edges = parse_edge_file(_read(args.edges))
        except ParseError as err:
            print(f"error: {args.edges}: {err}", file=sys.stderr)
            return EXIT_INPUT
        groups = []
        if args.groups:
            try:
                groups = parse_group_file(_read(args.groups))
            except ParseError as err:
                print(f"error: {args.groups}: {err}", file=sys.stderr)
                return EXIT_INPUT
        try:
            graph = build_graph(nodes, edges, groups)
        except GraphError as err:
            print(f"error: {err}", file=sys.stderr)
            return EXIT_INPUT
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT

    try:
        result = run_pipeline(graph, config)
        Path(args.out).write_text(result.svg, encoding="utf-8")
        if args.metrics:
            Path(args.metrics).write_text(result.metrics_json(), encoding="utf-8")
        if args.geometry:
            Path(args.geometry).write_text(
                json.dumps(result.geometry, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        print(result.table())
        for line in result.diagnostics:
            print(f"warning: {line}", file=sys.stderr)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as err:  # noqa: BLE001 - contract: internal failures exit 1
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
