import numpy as np
import pytest

from acqsim import NotAllAcquainted, PathTooShort, run_schedule
from acqsim.strategies import PairTeamStrategy, build_team_plan, gnp_pair_schedule
from acqsim.rng import substream

from conftest import abstract_graph, percolated_clique, tight_clique_points


class TestGnpPair:
    def test_complete_single_team(self):
        from acqsim.geometry import build_rgg

        h = build_rgg(tight_clique_points(20, 3), 0.01)
        rep = gnp_pair_schedule(h, k=20, seed=1)
        assert rep.rounds <= 40
        assert rep.details["team"] == 20 and rep.details["off_path"] == 0

    def test_edgeless(self):
        h = abstract_graph(10, [])
        with pytest.raises(PathTooShort):
            gnp_pair_schedule(h, k=3, seed=0)

    def test_percolated_clique(self):
        h = percolated_clique(200, 0.3, seed=4)
        rep = gnp_pair_schedule(h, k=60, seed=2)
        assert rep.rounds <= 6 * 60 + 10
        res = run_schedule(h, rep.schedule, engine="exact")
        assert res.all_acquainted

    def test_failure_surfaces_after_retries(self):
        # two cliques joined by one edge: a 0.8-fraction greedy path exists,
        # but the far clique pairs cannot all meet with k tiny
        edges = [(i, j) for i in range(10) for j in range(i + 1, 10)]
        edges += [(i, j) for i in range(10, 20) for j in range(i + 1, 20)]
        edges += [(9, 10)]
        h = abstract_graph(20, edges)
        with pytest.raises((NotAllAcquainted, PathTooShort)):
            gnp_pair_schedule(h, k=2, seed=0, retries=2)

    def test_estimator_wrapper(self):
        h = percolated_clique(80, 0.5, seed=1)
        strat = PairTeamStrategy(k=30, seed=3).fit(h)
        assert strat.report_.rounds <= 6 * 30 + 10
        assert strat.get_params()["k"] == 30


class TestBuildTeamPlan:
    def test_path_multiple_of_team(self):
        h = percolated_clique(100, 0.4, seed=2)
        plan = build_team_plan(h, np.arange(100), k=16, rng=substream(0, "t"))
        assert len(plan.path) % plan.team == 0
        assert len(plan.path) >= 0.8 * 100
        # swap-in saturates everything off the path
        off = set(range(100)) - set(int(v) for v in plan.path)
        assert set(int(u) for u, _ in plan.swap_in) == off

    def test_trim_shorter_than_k(self):
        h = percolated_clique(30, 0.9, seed=5)
        plan = build_team_plan(h, np.arange(30), k=50, rng=substream(1, "t"))
        assert plan.team == len(plan.path) <= 30
