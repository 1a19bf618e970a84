import math

import numpy as np
import pytest

from acqsim import (Disconnected, InvalidMatching, NoEdges, apply_matching,
                    brute_force_ac, brute_force_helicopter_ac, enumerate_matchings,
                    init_process, run_schedule, trivial_lower_bound)
from acqsim.schedule import Schedule

from conftest import abstract_graph, graph_from_coords, path_graph


def complete_graph(n):
    return abstract_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestInitProcess:
    def test_clique(self):
        st = init_process(complete_graph(3))
        assert st.acquainted_pairs() == 3 and st.all_acquainted()

    def test_edgeless(self):
        st = init_process(abstract_graph(4, []))
        assert st.acquainted_pairs() == 0

    def test_path3(self):
        st = init_process(path_graph(3))
        assert st.acquainted[0, 1] and st.acquainted[1, 2] and not st.acquainted[0, 2]
        assert st.round == 0 and st.is_bijection()


class TestApplyMatching:
    def test_path3_single_swap(self):
        g = path_graph(3)
        st = init_process(g)
        apply_matching(st, [(0, 1)], g)
        assert st.round == 1 and st.all_acquainted()
        assert st.agent_of[0] == 1 and st.agent_of[1] == 0

    def test_empty_matching(self):
        g = path_graph(3)
        st = init_process(g)
        before = st.acquainted.copy()
        apply_matching(st, np.empty((0, 2), dtype=np.int64), g)
        assert st.round == 1 and np.array_equal(st.acquainted, before)

    def test_vertex_reuse_rejected(self):
        g = path_graph(3)
        with pytest.raises(InvalidMatching):
            apply_matching(init_process(g), [(0, 1), (1, 2)], g)

    def test_non_edge_rejected(self):
        g = path_graph(3)
        with pytest.raises(InvalidMatching):
            apply_matching(init_process(g), [(0, 2)], g)

    def test_monotone_and_bijection(self):
        g = path_graph(5)
        st = init_process(g)
        prev = st.acquainted.copy()
        for m in ([(0, 1), (2, 3)], [(1, 2)], [(3, 4)], [(0, 1)]):
            apply_matching(st, m, g)
            assert (prev <= st.acquainted).all()
            assert st.is_bijection()
            prev = st.acquainted.copy()


class TestRunSchedule:
    def test_k4_empty_schedule(self):
        res = run_schedule(complete_graph(4), Schedule.from_matchings([]))
        assert res.all_acquainted and res.first_complete_round == 0
        assert res.total_rounds == 0

    def test_p3_one_swap(self):
        g = path_graph(3)
        res = run_schedule(g, Schedule.from_matchings([[(0, 1)]]))
        assert res.all_acquainted and res.first_complete_round == 1

    def test_p4_empty_schedule(self):
        res = run_schedule(path_graph(4), Schedule.from_matchings([]))
        assert not res.all_acquainted
        assert len(res.unacquainted_pairs) == 6 - 3

    def test_invalid_matching_round_index(self):
        g = path_graph(3)
        s = Schedule.from_matchings([[(0, 1)], [(0, 2)]])
        with pytest.raises(InvalidMatching) as err:
            run_schedule(g, s)
        assert err.value.round_index == 1


class TestTrivialLowerBound:
    def test_examples(self):
        assert trivial_lower_bound(path_graph(4)) == 1     # ceil(6/3) - 1
        assert trivial_lower_bound(complete_graph(5)) == 0  # ceil(10/10) - 1

    def test_formula(self):
        g = abstract_graph(100, [(i, i + 1) for i in range(99)] +
                           [(i, i + 2) for i in range(98)] +
                           [(i, i + 3) for i in range(97)] +
                           [(i, i + 4) for i in range(96)] +
                           [(0, j) for j in range(5, 65)])
        assert g.edge_count == 450
        assert trivial_lower_bound(g) == math.ceil(4950 / 450) - 1

    def test_no_edges(self):
        with pytest.raises(NoEdges):
            trivial_lower_bound(abstract_graph(3, []))


class TestEnumerateMatchings:
    def test_p3(self):
        ms = sorted(tuple(m) for m in enumerate_matchings(path_graph(3)))
        assert ms == [((0, 1),), ((1, 2),)]

    def test_k3(self):
        assert len(list(enumerate_matchings(complete_graph(3)))) == 3

    def test_p4(self):
        ms = [tuple(m) for m in enumerate_matchings(path_graph(4))]
        assert len(ms) == 4
        assert ((0, 1), (2, 3)) in ms


class TestBruteForce:
    def test_cliques_zero(self):
        for n in (2, 3, 4, 5):
            assert brute_force_ac(complete_graph(n)) == 0

    def test_p3(self):
        assert brute_force_ac(path_graph(3)) == 1

    def test_p4_exact(self):
        v = brute_force_ac(path_graph(4))
        assert v == 2
        assert v >= trivial_lower_bound(path_graph(4))

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            brute_force_ac(abstract_graph(4, [(0, 1), (2, 3)]))

    def test_no_edges(self):
        with pytest.raises(NoEdges):
            brute_force_ac(abstract_graph(3, []))

    def test_cap(self):
        from acqsim import Exceeded

        with pytest.raises(Exceeded):
            brute_force_ac(path_graph(5), round_cap=1)


class TestHelicopter:
    def test_k3(self):
        assert brute_force_helicopter_ac(complete_graph(3)) == 0

    def test_p3(self):
        assert brute_force_helicopter_ac(path_graph(3)) == 1

    def test_never_exceeds_ac(self):
        # helicopters only help: holds on every connected graph with n <= 4
        from conftest import connected_graphs_upto

        for n, edges in connected_graphs_upto(4):
            g = abstract_graph(n, edges)
            assert brute_force_helicopter_ac(g) <= brute_force_ac(g)


def test_oracle_dominance_and_reversal():
    # any valid schedule completes no sooner than the exact optimum, and a
    # schedule followed by its mirror restores the identity placement
    from acqsim import reverse_and_append
    from acqsim.strategies import hamiltonian_path_schedule
    from conftest import replay_positions

    for n in (3, 4, 5):
        g = path_graph(n)
        s = hamiltonian_path_schedule(g, list(range(n)))
        res = run_schedule(g, s)
        assert res.all_acquainted
        assert res.first_complete_round >= brute_force_ac(g)
        rs = reverse_and_append(s)
        assert np.array_equal(replay_positions(n, rs), np.arange(n))
