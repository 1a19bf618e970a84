"""Shared fixtures and small graph builders for the suite."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from acqsim.geometry import GeometricGraph, PointSet, build_percolated_rgg, build_rgg


def graph_from_coords(coords, r: float, seed: int = 0) -> GeometricGraph:
    coords = np.asarray(coords, dtype=np.float64)
    ps = PointSet(coords=coords, seed=seed, n=len(coords))
    return build_rgg(ps, r)


def path_graph(n: int, spacing: float = 0.1) -> GeometricGraph:
    """n collinear points where only consecutive ones are within range."""
    xs = 0.05 + spacing * np.arange(n)
    if n and xs[-1] > 1.0:
        raise ValueError("path too long for the unit square")
    coords = np.stack([xs, np.full(n, 0.5)], axis=1)
    return graph_from_coords(coords, spacing * 1.2)


def tight_clique_points(t: int, seed: int) -> PointSet:
    """t points inside a tiny disc: the r=0.01 graph on them is complete."""
    gen = np.random.default_rng(seed)
    coords = 0.5 + 0.001 * (gen.random((t, 2)) - 0.5)
    return PointSet(coords=coords, seed=seed, n=t)


def percolated_clique(t: int, p: float, seed: int) -> GeometricGraph:
    return build_percolated_rgg(tight_clique_points(t, seed), 0.01, p, seed)


def replay_positions(n: int, schedule):
    """agent -> vertex after replaying all matchings (no validity checks)."""
    vertex_of = np.arange(n)
    agent_of = np.arange(n)
    for m in schedule.iter_matchings():
        for u, v in np.asarray(m).reshape(-1, 2):
            au, av = agent_of[u], agent_of[v]
            agent_of[u], agent_of[v] = av, au
            vertex_of[av], vertex_of[au] = u, v
    return vertex_of


def connected_graphs_upto(n_max: int):
    """All connected graphs on 1..n_max labeled vertices, one per isomorphism
    class, as (n, edge list).  Dedup by the minimum adjacency bitmask over
    all vertex permutations."""
    out = []
    for n in range(1, n_max + 1):
        pairs = list(itertools.combinations(range(n), 2))
        seen = set()
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            if not _connected(n, edges):
                continue
            canon = min(_perm_mask(n, edges, perm, pairs)
                        for perm in itertools.permutations(range(n)))
            if canon not in seen:
                seen.add(canon)
                out.append((n, edges))
    return out


def _connected(n, edges):
    if n == 1:
        return True
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def _perm_mask(n, edges, perm, pairs):
    index = {pair: i for i, pair in enumerate(pairs)}
    mask = 0
    for u, v in edges:
        a, b = perm[u], perm[v]
        mask |= 1 << index[(min(a, b), max(a, b))]
    return mask


def abstract_graph(n: int, edges) -> GeometricGraph:
    """A graph with exactly the given edges: realized as a percolation of
    the complete graph on a tight point cluster (any edge set is a valid
    percolation outcome, so the process semantics are unaffected)."""
    from acqsim.geometry import _csr_from_edges

    ps = tight_clique_points(max(n, 1), seed=0)
    edge_arr = np.array(sorted((min(u, v), max(u, v)) for u, v in edges),
                        dtype=np.int64).reshape(-1, 2)
    indptr, indices = _csr_from_edges(n, edge_arr)
    return GeometricGraph(points=ps, radius=0.01, edge_prob=0.5,
                          edges=edge_arr, indptr=indptr, indices=indices)


@pytest.fixture(scope="session")
def small_connected_graphs():
    """All connected graphs on <= 5 vertices, one per isomorphism class."""
    return [abstract_graph(n, edges) for n, edges in connected_graphs_upto(5)]
