import math

import numpy as np
import pytest
from sklearn.base import clone

from acqsim import ConcentrationFailed, build_rgg, run_schedule, sample_points
from acqsim.strategies import DenseStrategy, dense_schedule

from conftest import graph_from_coords


def dense_instance(n, seed, K=100.0):
    r = math.sqrt(K * math.log(n) / (math.pi * n))
    return build_rgg(sample_points(n, seed), r)


class TestDenseStrategy:
    def test_small_instance_structured_vs_exact(self):
        g = dense_instance(1500, 3)
        strat = DenseStrategy(engine="structured").fit(g)
        rep = strat.report_
        assert rep.rounds == len(strat.schedule_) == 2 * strat.n_tours_ * strat.m_ ** 2
        res = run_schedule(g, strat.schedule_, engine="exact")
        assert res.all_acquainted and res.total_rounds == rep.rounds

    def test_clique_degenerates_to_empty(self):
        g = graph_from_coords(0.5 + 1e-3 * np.random.default_rng(0).random((30, 2)), 0.5)
        rep = dense_schedule(g)
        assert rep.rounds == 0

    def test_concentration_bracket(self):
        g = dense_instance(1000, 1)
        with pytest.raises(ConcentrationFailed):
            DenseStrategy(bracket=(0.999, 1.001)).fit(g)

    def test_empty_cell_rejected(self):
        # points confined to the left half: right-half cells are empty
        gen = np.random.default_rng(5)
        coords = gen.random((400, 2)) * [0.45, 1.0]
        g = graph_from_coords(coords, 0.3)
        with pytest.raises(ConcentrationFailed):
            DenseStrategy().fit(g)

    def test_percolated_rejected(self):
        from acqsim import percolate

        g = percolate(dense_instance(800, 2), 0.5, 1)
        with pytest.raises(ValueError):
            DenseStrategy().fit(g)

    def test_sklearn_params(self):
        strat = DenseStrategy(c_cell=2.5, bracket=(0.5, 2.0))
        params = strat.get_params()
        assert params["c_cell"] == 2.5 and params["bracket"] == (0.5, 2.0)
        twin = clone(strat)
        assert twin.get_params() == params

    def test_rounds_scale_with_grid(self):
        reports = {}
        for n in (1000, 4000):
            rep = dense_schedule(dense_instance(n, 7))
            m = rep.details["m"]
            reports[n] = rep.rounds / m ** 2
        vals = list(reports.values())
        assert max(vals) / min(vals) <= 3.0
