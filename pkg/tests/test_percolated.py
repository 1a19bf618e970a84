import math

import numpy as np
import pytest

from acqsim import MatchingMissing, build_percolated_rgg, build_rgg, run_schedule, sample_points
from acqsim.geometry import GeometricGraph, _csr_from_edges
from acqsim.strategies import PercolatedStrategy


def percolated_instance(n, seed, K=30.0, p=0.5):
    r = math.sqrt(K * math.log(n) / (p * n))
    r = min(r, 1.2)
    return build_percolated_rgg(sample_points(n, seed), r, p, seed)


class TestPercolatedStrategy:
    def test_micro_structured_vs_exact(self):
        g = percolated_instance(400, 3, K=25.0, p=0.5)
        strat = PercolatedStrategy(k=18, seed=1, engine="structured").fit(g)
        rep = strat.report_
        res = run_schedule(g, strat.schedule_, engine="exact")
        assert res.all_acquainted
        assert res.total_rounds == rep.rounds == len(strat.schedule_)

    def test_p1_skips_phases(self):
        g = build_rgg(sample_points(600, 2), 0.35)
        strat = PercolatedStrategy(seed=0).fit(g)
        # pure geometry: same tour structure as the dense strategy
        assert all(seg.phase_plans is None for seg in strat.schedule_.segments)
        assert strat.report_.rounds == 2 * strat.n_tours_ * strat.m_ ** 2

    def test_adversarial_cut_raises(self):
        g = percolated_instance(400, 3, K=25.0, p=0.5)
        # delete every edge between the slot windows of one consecutive cell
        # pair of the boustrophedon, so no transfer matching can exist
        from acqsim.strategies.tours import build_layout, window_slots

        layout = build_layout(g, 3.0)
        slots = window_slots(layout, 0)
        left = set(int(v) for v in slots[0])
        right = set(int(v) for v in slots[1])
        keep = [i for i, (u, v) in enumerate(g.edges)
                if not ((int(u) in left and int(v) in right) or
                        (int(u) in right and int(v) in left))]
        edges = g.edges[keep]
        indptr, indices = _csr_from_edges(g.n, edges)
        cut = GeometricGraph(points=g.points, radius=g.radius, edge_prob=g.edge_prob,
                             edges=edges, indptr=indptr, indices=indices)
        with pytest.raises(MatchingMissing):
            PercolatedStrategy(k=18, seed=1).fit(cut)

    def test_report_ratio(self):
        g = percolated_instance(500, 7, K=25.0, p=0.5)
        strat = PercolatedStrategy(k=16, seed=5).fit(g)
        rep = strat.report_
        assert rep.bound_ratio == rep.rounds / (strat.m_ ** 2 * strat.k_)
        assert rep.rounds >= 1
