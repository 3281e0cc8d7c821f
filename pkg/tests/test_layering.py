from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import graph_from, random_graph
from pathlay.layering import (
    LayoutState,
    assign_depths,
    back_edges,
    normalize_ranks,
    retained_edges,
)
from pathlay.model import NodeId


def _ids(mapping):
    return {k.raw: v for k, v in mapping.items()}


class TestAssignDepths:
    def test_chain(self):
        depths = assign_depths(graph_from(3, [(1, 2), (2, 3)]))
        assert _ids(depths) == {"1": 0, "2": 1, "3": 2}

    def test_diamond_longest_path(self):
        g = graph_from(4, [(1, 2), (1, 3), (2, 4), (3, 4)])
        assert _ids(assign_depths(g)) == {"1": 0, "2": 1, "3": 1, "4": 2}

    def test_two_cycle_drops_back_edge(self):
        g = graph_from(2, [(1, 2), (2, 1)])
        assert back_edges(g) == {(NodeId("2"), NodeId("1"))}
        assert _ids(assign_depths(g)) == {"1": 0, "2": 1}

    def test_longest_path_beats_shortcut(self):
        g = graph_from(4, [(1, 4), (1, 2), (2, 3), (3, 4)])
        assert _ids(assign_depths(g))["4"] == 3

    @given(st.integers(0, 3000))
    @settings(max_examples=60)
    def test_terminates_and_orders_retained_edges(self, seed):
        g = random_graph(seed)
        depths = assign_depths(g)
        assert set(depths) == {n.id for n in g.nodes}
        for u, v in retained_edges(g):
            assert depths[v] >= depths[u] + 1


class TestNormalizeRanks:
    def test_dense_rank_example(self):
        coords = {
            NodeId("1"): (0.3, 0.0),
            NodeId("2"): (0.3, 1.0),
            NodeId("3"): (7.1, 2.0),
            NodeId("4"): (2.0, 3.0),
        }
        state = normalize_ranks(coords)
        assert [state.positions[NodeId(i)][0] for i in "1234"] == [0, 0, 2, 1]

    def test_all_equal_y_spread_in_input_order(self):
        coords = {NodeId(str(i)): (1.0, 5.0) for i in range(1, 5)}
        state = normalize_ranks(coords)
        assert [state.positions[NodeId(str(i))] for i in range(1, 5)] == [
            (0, 0),
            (0, 1),
            (0, 2),
            (0, 3),
        ]

    def test_single_node(self):
        state = normalize_ranks({NodeId("1"): (4.2, -3.0)})
        assert state.positions[NodeId("1")] == (0, 0)
        assert (state.col_count, state.row_count) == (1, 1)

    def test_collision_pushes_to_next_free_row(self):
        coords = {
            NodeId("1"): (0.0, 0.0),
            NodeId("2"): (0.0, 0.0),
            NodeId("3"): (0.0, 1.0),
        }
        state = normalize_ranks(coords)
        assert [state.positions[NodeId(i)][1] for i in "123"] == [0, 1, 2]

    @given(
        st.dictionaries(
            st.integers(1, 50).map(lambda i: NodeId(str(i))),
            st.tuples(
                st.floats(-100, 100, allow_nan=False),
                st.floats(-100, 100, allow_nan=False),
            ),
            min_size=1,
            max_size=25,
        )
    )
    def test_uniqueness_and_order_preservation(self, coords):
        state = normalize_ranks(coords)
        cells = list(state.positions.values())
        assert len(set(cells)) == len(cells)
        for a, (xa, _) in coords.items():
            for b, (xb, _) in coords.items():
                if xa < xb:
                    assert state.positions[a][0] < state.positions[b][0]
                elif xa == xb:
                    assert state.positions[a][0] == state.positions[b][0]


class TestLayoutState:
    def test_rejects_shared_cell(self):
        with pytest.raises(ValueError):
            LayoutState.from_positions({NodeId("1"): (0, 0), NodeId("2"): (0, 0)})

    def test_rejects_out_of_bounds(self):
        with pytest.raises(ValueError):
            LayoutState({NodeId("1"): (2, 0)}, 1, 1).validate()
