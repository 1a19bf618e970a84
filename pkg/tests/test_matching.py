import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acqsim import MissingTransferMatching, build_rgg, sample_points
from acqsim.matching import (BipartiteGraph, grid_four_cover, hall_violator,
                             inter_cell_matchings, max_matching)


def brute_force_max_matching(b: BipartiteGraph) -> int:
    best = 0
    edges = [(u, v) for u in range(b.n_left) for v in b.adj[u]]

    def rec(i, used_l, used_r, size):
        nonlocal best
        best = max(best, size)
        if i == len(edges) or size + (len(edges) - i) <= best:
            return
        u, v = edges[i]
        if u not in used_l and v not in used_r:
            rec(i + 1, used_l | {u}, used_r | {v}, size + 1)
        rec(i + 1, used_l, used_r, size)

    rec(0, frozenset(), frozenset(), 0)
    return best


@st.composite
def bipartite_graphs(draw):
    nl = draw(st.integers(1, 8))
    nr = draw(st.integers(1, 8))
    edges = draw(st.sets(st.tuples(st.integers(0, nl - 1), st.integers(0, nr - 1)),
                         max_size=nl * nr))
    return BipartiteGraph.from_edges(nl, nr, sorted(edges))


class TestMaxMatching:
    def test_complete(self):
        b = BipartiteGraph.from_edges(5, 5, itertools.product(range(5), range(5)))
        pairs, size = max_matching(b)
        assert size == 5
        assert len({u for u, _ in pairs}) == 5 and len({v for _, v in pairs}) == 5

    def test_star(self):
        b = BipartiteGraph.from_edges(1, 6, [(0, v) for v in range(6)])
        assert max_matching(b)[1] == 1
        b2 = BipartiteGraph.from_edges(6, 1, [(u, 0) for u in range(6)])
        assert max_matching(b2)[1] == 1

    @settings(max_examples=120, deadline=None)
    @given(bipartite_graphs())
    def test_matches_brute_force(self, b):
        pairs, size = max_matching(b)
        assert size == brute_force_max_matching(b)
        # pairs form a valid matching over existing edges
        assert len({u for u, _ in pairs}) == len(pairs)
        assert len({v for _, v in pairs}) == len(pairs)
        for u, v in pairs:
            assert v in b.adj[u]


class TestHallViolator:
    def test_perfect_instance(self):
        b = BipartiteGraph.from_edges(3, 3, [(0, 0), (1, 1), (2, 2), (0, 1)])
        assert hall_violator(b) is None

    def test_isolated_left_vertex(self):
        b = BipartiteGraph.from_edges(2, 2, [(0, 0), (0, 1)])
        violator = hall_violator(b)
        assert violator == {1}

    @settings(max_examples=120, deadline=None)
    @given(bipartite_graphs())
    def test_witness_is_deficient(self, b):
        violator = hall_violator(b)
        _, size = max_matching(b)
        if violator is None:
            assert size == b.n_left
        else:
            nbrs = set()
            for u in violator:
                nbrs.update(b.adj[u])
            assert len(nbrs) < len(violator)


class TestInterCellMatchings:
    def test_complete_bipartite(self):
        g = build_rgg(sample_points(40, 8), 1.4)  # nearly complete
        groups = {0: np.arange(0, 10), 1: np.arange(10, 20), 2: np.arange(20, 30)}
        out = inter_cell_matchings(g, groups, [(0, 1), (1, 2)])
        for (a, b), m in out.items():
            assert len(m) == 10
            assert set(m[:, 0]) == set(groups[a]) and set(m[:, 1]) == set(groups[b])
            for u, v in m:
                assert g.has_edge(int(u), int(v))

    def test_missing_matching(self, ):
        from conftest import abstract_graph

        g = abstract_graph(4, [(0, 1), (2, 3)])
        groups = {0: np.array([0, 2]), 1: np.array([1, 3])}
        # only a perfect matching (0-1, 2-3) exists: fine
        inter_cell_matchings(g, groups, [(0, 1)])
        g2 = abstract_graph(4, [(0, 1), (0, 3)])
        with pytest.raises(MissingTransferMatching):
            inter_cell_matchings(g2, groups, [(0, 1)])

    def test_size_mismatch(self):
        from conftest import abstract_graph

        g = abstract_graph(3, [(0, 1), (1, 2)])
        with pytest.raises(MissingTransferMatching):
            inter_cell_matchings(g, {0: np.array([0]), 1: np.array([1, 2])}, [(0, 1)])


class TestGridFourCover:
    @pytest.mark.parametrize("m1,m2", [(2, 2), (1, 5), (3, 3), (4, 7)])
    def test_exact_cover(self, m1, m2):
        cover = grid_four_cover(m1, m2)
        assert len(cover.matchings) == 4
        all_edges = cover.all_edges()
        expected = m1 * (m2 - 1) + m2 * (m1 - 1)
        assert len(all_edges) == expected == len(set(all_edges))
        for m in cover.matchings:
            cells = [c for e in m for c in e]
            assert len(cells) == len(set(cells))  # vertex-disjoint

    def test_small_counts(self):
        assert len(grid_four_cover(2, 2).all_edges()) == 4
        cover15 = grid_four_cover(1, 5)
        nonempty = [m for m in cover15.matchings if m]
        assert len(nonempty) == 2 and len(cover15.all_edges()) == 4
        assert len(grid_four_cover(3, 3).all_edges()) == 12
