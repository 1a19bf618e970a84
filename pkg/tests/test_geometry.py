import json
import math

import numpy as np
import pytest

from acqsim import (ConfigError, RadiusOutOfRange, build_percolated_rgg, build_rgg,
                    dissect, dissect_by_m, percolate, sample_points)
from acqsim.geometry import GeometricGraph

from conftest import graph_from_coords


class TestSamplePoints:
    def test_empty(self):
        ps = sample_points(0, 7)
        assert ps.n == 0 and len(ps.coords) == 0

    def test_range(self):
        ps = sample_points(5, 1)
        assert ps.coords.shape == (5, 2)
        assert (ps.coords >= 0).all() and (ps.coords <= 1).all()

    def test_deterministic(self):
        a = sample_points(1000, 42)
        b = sample_points(1000, 42)
        assert np.array_equal(a.coords, b.coords)

    def test_negative_n(self):
        with pytest.raises(ConfigError):
            sample_points(-1, 0)


class TestBuildRgg:
    def test_hand_path(self):
        g = graph_from_coords([[0.0, 0.0], [0.0, 0.5], [0.0, 1.0]], 0.6)
        assert g.edges.tolist() == [[0, 1], [1, 2]]

    def test_distance_just_over(self):
        g = graph_from_coords([[0.0, 0.0], [1.0, 1.0]], 1.41)
        assert g.edge_count == 0

    def test_tie_counts_as_edge(self):
        g = graph_from_coords([[0.1, 0.5], [0.6, 0.5]], 0.5)
        assert g.edge_count == 1

    def test_radius_rejected(self):
        ps = sample_points(3, 0)
        for r in (0.0, -0.2, math.sqrt(2.0), 1.5):
            with pytest.raises(RadiusOutOfRange):
                build_rgg(ps, r)

    def test_matches_brute_force(self):
        ps = sample_points(400, 9)
        r = 0.08
        g = build_rgg(ps, r)
        d2 = ((ps.coords[:, None, :] - ps.coords[None, :, :]) ** 2).sum(axis=2)
        iu, ju = np.triu_indices(ps.n, k=1)
        expected = {(int(a), int(b)) for a, b in zip(iu, ju) if d2[a, b] <= r * r}
        assert {(int(u), int(v)) for u, v in g.edges} == expected

    def test_adjacency_symmetric_sorted(self):
        g = build_rgg(sample_points(300, 3), 0.1)
        assert g.edge_count * 2 == len(g.indices)
        for v in range(g.n):
            row = g.neighbors(v)
            assert (np.diff(row) > 0).all() if len(row) > 1 else True
            for w in row:
                assert g.has_edge(int(w), v)

    def test_expected_edge_count(self):
        # Monte Carlo oracle: E|edges| = C(n,2) * (pi r^2 - boundary loss)
        n, r = 20000, 0.01
        g = build_rgg(sample_points(n, 3), r)
        dense = n * (n - 1) / 2 * math.pi * r * r
        assert 0.85 <= g.edge_count / dense <= 1.0


class TestPercolate:
    def test_identity_at_p1(self):
        g = build_rgg(sample_points(200, 1), 0.2)
        assert np.array_equal(percolate(g, 1.0, 5).edges, g.edges)

    def test_degenerate_small_p(self):
        g = build_rgg(sample_points(100, 1), 0.5)
        assert percolate(g, 1e-12, 0).edge_count == 0

    def test_subset_property(self):
        g = build_rgg(sample_points(300, 2), 0.2)
        full = {(int(u), int(v)) for u, v in g.edges}
        for seed in range(5):
            sub = percolate(g, 0.4, seed)
            assert {(int(u), int(v)) for u, v in sub.edges} <= full

    def test_binomial_concentration(self):
        g = build_rgg(sample_points(600, 4), 0.2)
        e = g.edge_count
        assert e > 10000
        for seed in range(20):
            kept = percolate(g, 0.5, seed).edge_count
            assert abs(kept - 0.5 * e) < 6 * math.sqrt(e * 0.25)

    def test_deterministic(self):
        g = build_rgg(sample_points(300, 2), 0.2)
        a = percolate(g, 0.3, 11)
        b = percolate(g, 0.3, 11)
        assert np.array_equal(a.edges, b.edges)

    def test_fused_builder_matches(self):
        ps = sample_points(500, 6)
        two_step = percolate(build_rgg(ps, 0.15), 0.3, 9)
        fused = build_percolated_rgg(ps, 0.15, 0.3, 9)
        assert np.array_equal(two_step.edges, fused.edges)

    def test_rejects_double_percolation(self):
        g = percolate(build_rgg(sample_points(50, 1), 0.3), 0.5, 0)
        with pytest.raises(ConfigError):
            percolate(g, 0.5, 1)


def test_edge_count_concentration_across_seeds():
    # n^2 r^2 >> 1: max/min edge count over seeds stays within 10%
    n, r = 3000, 0.04
    counts = [build_rgg(sample_points(n, seed), r).edge_count for seed in range(10)]
    assert max(counts) / min(counts) <= 1.1


class TestDissect:
    def test_grid_arithmetic(self):
        d = dissect(sample_points(100, 1), 3.0, 0.5)
        assert d.m == 6 and d.n_cells == 36

    def test_boundary_clamp(self):
        from acqsim.geometry import PointSet

        coords = np.array([[1.0, 1.0]])
        ps = PointSet(coords=coords, seed=0, n=1)
        d = dissect_by_m(ps, 4)
        assert int(d.cell_of[0]) == 4 * 4 - 1

    def test_partition(self):
        ps = sample_points(10000, 5)
        d = dissect_by_m(ps, 20)
        assert sum(len(m) for m in d.members) == 10000
        for c, members in enumerate(d.members):
            assert (d.cell_of[members] == c).all()

    def test_touching8_adjacency(self):
        d = dissect_by_m(sample_points(10, 1), 4)
        assert d.cells_adjacent(0, 1) and d.cells_adjacent(0, 5)
        assert not d.cells_adjacent(0, 2) and not d.cells_adjacent(3, 4)

    def test_corner_rule(self):
        # side 0.25; corner distance limit r - s*sqrt(2)
        d = dissect_by_m(sample_points(10, 1), 4, rule="corner_rule", r=0.65)
        assert d.cells_adjacent(0, 1)        # corner distance 0.25 <= 0.296
        assert not d.cells_adjacent(0, 5)    # diagonal 0.354 > 0.296
        tight = dissect_by_m(sample_points(10, 1), 4, rule="corner_rule", r=0.3)
        assert not tight.cells_adjacent(0, 1)  # limit negative: no edges at all


class TestSerialization:
    def test_roundtrip(self):
        g = percolate(build_rgg(sample_points(50, 3), 0.3), 0.7, 1)
        h = GeometricGraph.from_json(g.to_json())
        assert h.n == g.n and np.array_equal(h.edges, g.edges)
        assert h.radius == g.radius and h.edge_prob == g.edge_prob

    def test_byte_identical(self):
        a = build_rgg(sample_points(40, 2), 0.2).to_json()
        b = build_rgg(sample_points(40, 2), 0.2).to_json()
        assert a == b
        json.loads(a)  # valid JSON
