import numpy as np
import pytest

from acqsim import (Disconnected, MissingTransferMatching, NotAPath, build_rgg,
                    run_schedule, sample_points)
from acqsim.schedule import Schedule, oet_rounds_for_path
from acqsim.strategies import (GroupMap, bounded_degree_spanning_tree,
                               grid_hamiltonian_path, hamiltonian_path_schedule,
                               lift_schedule, tree_walk_schedule)

from conftest import abstract_graph, graph_from_coords, path_graph, replay_positions


def visit_sets(n, schedule):
    """Per-agent set of visited vertices over the whole replay."""
    vertex_of = np.arange(n)
    agent_of = np.arange(n)
    visited = [{int(v)} for v in range(n)]
    for m in schedule.iter_matchings():
        for u, v in np.asarray(m).reshape(-1, 2):
            au, av = agent_of[u], agent_of[v]
            agent_of[u], agent_of[v] = av, au
            vertex_of[av], vertex_of[au] = u, v
            visited[au].add(int(v))
            visited[av].add(int(u))
    return visited


class TestHamiltonianPath:
    def test_two_vertices(self):
        g = path_graph(2)
        s = hamiltonian_path_schedule(g, [0, 1])
        assert len(s) <= 4
        assert run_schedule(g, s).all_acquainted

    @pytest.mark.parametrize("n", [3, 5, 17, 64])
    def test_all_pairs_and_visits(self, n):
        g = path_graph(n, spacing=0.9 / max(n, 2))
        s = hamiltonian_path_schedule(g, list(range(n)))
        assert len(s) <= 2 * n
        assert run_schedule(g, s).all_acquainted
        assert all(len(vs) == n for vs in visit_sets(n, s))

    def test_not_a_path(self):
        g = path_graph(4)
        with pytest.raises(NotAPath):
            hamiltonian_path_schedule(g, [0, 2, 1, 3])
        with pytest.raises(NotAPath):
            hamiltonian_path_schedule(g, [0, 1, 1, 2])


class TestGridHamiltonianPath:
    def test_single(self):
        assert grid_hamiltonian_path(1, 1) == [(0, 0)]

    def test_boustrophedon_2x2(self):
        assert grid_hamiltonian_path(2, 2) == [(0, 0), (0, 1), (1, 1), (1, 0)]

    def test_adjacency(self):
        path = grid_hamiltonian_path(3, 3)
        assert len(path) == 9 and len(set(path)) == 9
        for (r1, c1), (r2, c2) in zip(path, path[1:]):
            assert abs(r1 - r2) + abs(c1 - c2) == 1


def blowup_graph(rows, cols, t, pitch=0.26):
    """Geometric realization of grid[K_t]: t near-coincident points per cell."""
    coords = []
    for r in range(rows):
        for c in range(cols):
            for k in range(t):
                coords.append([0.1 + c * pitch + 1e-4 * k, 0.1 + r * pitch + 1e-4 * k])
    return graph_from_coords(coords, pitch * 1.05)


class TestLift:
    @pytest.mark.parametrize("t", [2, 5])
    def test_grid_blowup(self, t):
        rows = cols = 3
        host = blowup_graph(rows, cols, t)
        order = [r * cols + c for r, c in grid_hamiltonian_path(rows, cols)]
        base = Schedule.from_matchings(
            oet_rounds_for_path(np.array(order), 2 * len(order)), strategy_name="grid")
        gm = GroupMap({i: np.arange(t * i, t * (i + 1)) for i in range(rows * cols)}, t)
        transfer = {}
        for a in range(rows * cols):
            for b in range(rows * cols):
                if a < b:
                    transfer[(a, b)] = np.stack([gm.groups[a], gm.groups[b]], axis=1)
        lifted = lift_schedule(base, gm, transfer)
        assert len(lifted) == len(base)  # one host round per base round
        assert run_schedule(host, lifted).all_acquainted

    def test_single_swap(self):
        host = blowup_graph(1, 2, 3)
        base = Schedule.from_matchings([[(0, 1)]])
        gm = GroupMap({0: np.arange(3), 1: np.arange(3, 6)}, 3)
        transfer = {(0, 1): np.stack([np.arange(3), np.arange(3, 6)], axis=1)}
        lifted = lift_schedule(base, gm, transfer)
        assert len(lifted) == 1
        pos = replay_positions(6, lifted)
        assert set(pos[:3]) == {3, 4, 5} and set(pos[3:]) == {0, 1, 2}

    def test_missing_transfer(self):
        base = Schedule.from_matchings([[(0, 1)]])
        gm = GroupMap({0: np.arange(2), 1: np.arange(2, 4)}, 2)
        with pytest.raises(MissingTransferMatching):
            lift_schedule(base, gm, {})


class TestSpanningTree:
    def test_collinear_is_path(self):
        g = graph_from_coords([[0.1, 0.5], [0.3, 0.5], [0.5, 0.5]], 0.25)
        tree = bounded_degree_spanning_tree(g)
        assert sorted((min(u, v), max(u, v)) for u, v in tree.edges()) == [(0, 1), (1, 2)]

    def test_two_points(self):
        g = graph_from_coords([[0.2, 0.5], [0.4, 0.5]], 0.3)
        assert bounded_degree_spanning_tree(g).edges() == [(0, 1)]

    def test_degree_bound_random(self):
        hits = 0
        for seed in range(25):
            g = build_rgg(sample_points(400, seed), 0.11)
            if not g.is_connected():
                continue
            hits += 1
            tree = bounded_degree_spanning_tree(g)
            assert tree.max_degree() <= 5
            assert len(tree.edges()) == g.n - 1
            for u, v in tree.edges():
                assert g.has_edge(u, v)
        assert hits >= 15

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            bounded_degree_spanning_tree(abstract_graph(4, [(0, 1), (2, 3)]))


class TestTreeWalk:
    def test_single_vertex(self):
        from acqsim.strategies import Tree

        tree = Tree(parent=np.array([-1]), root=0)
        assert len(tree_walk_schedule(tree)) == 0

    def test_star(self):
        g = graph_from_coords(
            [[0.5, 0.5], [0.5, 0.62], [0.62, 0.5], [0.5, 0.38], [0.38, 0.5]], 0.15)
        tree = bounded_degree_spanning_tree(g)
        s = tree_walk_schedule(tree)
        assert run_schedule(g, s).all_acquainted
        assert np.array_equal(replay_positions(g.n, s), np.arange(g.n))

    def test_random_tree_verified(self):
        g = build_rgg(sample_points(40, 12), 0.25)
        assert g.is_connected()
        tree = bounded_degree_spanning_tree(g)
        s = tree_walk_schedule(tree)
        n = g.n
        assert len(s) <= 2 * (n - 1) * n
        assert run_schedule(g, s).all_acquainted
        assert np.array_equal(replay_positions(n, s), np.arange(n))

    def test_path_vs_hamiltonian(self):
        g = path_graph(6)
        tree = bounded_degree_spanning_tree(g)
        walk = tree_walk_schedule(tree)
        ham = hamiltonian_path_schedule(g, list(range(6)))
        assert run_schedule(g, walk).all_acquainted
        assert len(ham) <= len(walk)
