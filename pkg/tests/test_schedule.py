import numpy as np
import pytest

from acqsim import ConfigError, reverse_and_append
from acqsim.schedule import LocalPlan, Schedule, brick_pairs

from conftest import replay_positions


def random_schedule(g, rounds, seed):
    """Random greedy matchings: shuffle the edges, take what stays disjoint."""
    gen = np.random.default_rng(seed)
    matchings = []
    for _ in range(rounds):
        used = set()
        pairs = []
        for idx in gen.permutation(g.edge_count)[: 3 * g.n]:
            u, v = map(int, g.edges[idx])
            if u not in used and v not in used:
                pairs.append((u, v))
                used.add(u)
                used.add(v)
        matchings.append(np.array(pairs, dtype=np.int64))
    return Schedule.from_matchings(matchings)


class TestReverseAndAppend:
    def test_empty(self):
        s = Schedule.from_matchings([])
        assert len(reverse_and_append(s)) == 0

    def test_doubles_length_and_restores(self):
        from acqsim import build_rgg, sample_points

        g = build_rgg(sample_points(50, 3), 0.3)
        for seed in range(20):
            s = random_schedule(g, 10, seed)
            rs = reverse_and_append(s)
            assert len(rs) == 2 * len(s)
            assert np.array_equal(replay_positions(g.n, rs), np.arange(g.n))

    def test_preserves_acquaintances(self):
        from acqsim import run_schedule
        from conftest import path_graph

        g = path_graph(3)
        s = Schedule.from_matchings([[(0, 1)]])
        res = run_schedule(g, reverse_and_append(s))
        assert res.all_acquainted and res.total_rounds == 2


class TestJson:
    def test_roundtrip(self):
        s = Schedule.from_matchings([[(0, 1)], [], [(2, 3), (4, 5)]],
                                    strategy_name="demo", params={"k": 3})
        t = Schedule.from_json(s.to_json())
        assert t.strategy_name == "demo" and t.params == {"k": 3}
        assert [m.tolist() for m in t.iter_matchings()] == \
            [m.tolist() for m in s.iter_matchings()]

    def test_materialize_guard(self):
        big = Schedule.from_matchings(
            [np.stack([np.arange(0, 4000, 2), np.arange(1, 4000, 2)], axis=1)] * 1200)
        with pytest.raises(ConfigError):
            big.to_json()


class TestBrickPairs:
    def test_pattern(self):
        assert brick_pairs(5, 0) == [(0, 1), (2, 3)]
        assert brick_pairs(5, 1) == [(1, 2), (3, 4)]
        assert brick_pairs(2, 1) == []
        assert brick_pairs(1, 0) == []


class TestLocalPlan:
    def test_rounds_shape_no_offpath(self):
        plan = LocalPlan(universe=np.arange(6), path=np.arange(6), team=3,
                         swap_in=np.empty((0, 2), dtype=np.int64))
        rounds = plan.rounds()
        assert len(rounds) == 6 == plan.n_rounds
        # two teams of 3 rotate simultaneously
        assert rounds[0].tolist() == [[0, 1], [3, 4]]
        assert rounds[1].tolist() == [[1, 2], [4, 5]]

    def test_rounds_shape_with_offpath(self):
        plan = LocalPlan(universe=np.arange(8), path=np.arange(6), team=3,
                         swap_in=np.array([[6, 0], [7, 3]], dtype=np.int64))
        rounds = plan.rounds()
        assert len(rounds) == 13 == plan.n_rounds
        assert rounds[6].tolist() == [[6, 0], [7, 3]]
