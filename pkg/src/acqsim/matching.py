"""Bipartite maximum matching with Hall-condition witnesses.

The engine is Hopcroft-Karp (layered augmentation, O(E sqrt(V))), iterative
so deep alternating paths cannot blow the recursion limit.  Adjacency lists
are kept in sorted order, which makes every matching a pure function of the
input graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingTransferMatching

__all__ = [
    "BipartiteGraph",
    "max_matching",
    "hall_violator",
    "inter_cell_matchings",
    "GridMatchingCover",
    "grid_four_cover",
]

_INF = -1


@dataclass
class BipartiteGraph:
    """Left/right vertex classes with left -> right adjacency lists."""

    n_left: int
    n_right: int
    adj: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.adj:
            self.adj = [[] for _ in range(self.n_left)]
        if len(self.adj) != self.n_left:
            raise ValueError("adjacency length must equal n_left")
        cleaned = []
        for row in self.adj:
            row = sorted(set(int(x) for x in row))
            if row and (row[0] < 0 or row[-1] >= self.n_right):
                raise ValueError("right vertex id out of range")
            cleaned.append(row)
        self.adj = cleaned

    @classmethod
    def from_edges(cls, n_left: int, n_right: int, edges) -> "BipartiteGraph":
        adj: list[list[int]] = [[] for _ in range(n_left)]
        for u, v in edges:
            adj[int(u)].append(int(v))
        return cls(n_left=n_left, n_right=n_right, adj=adj)


def _hopcroft_karp(b: BipartiteGraph) -> tuple[list[int], list[int]]:
    """Returns (pair_left, pair_right); unmatched entries are -1."""
    pair_l = [-1] * b.n_left
    pair_r = [-1] * b.n_right
    dist = [0] * b.n_left

    def bfs() -> bool:
        q: deque[int] = deque()
        found = False
        for u in range(b.n_left):
            if pair_l[u] == -1:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = _INF
        while q:
            u = q.popleft()
            for v in b.adj[u]:
                w = pair_r[v]
                if w == -1:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(root: int) -> bool:
        # iterative emulation of the layered-graph DFS
        it = [(root, iter(b.adj[root]))]
        chain: list[tuple[int, int]] = []
        while it:
            u, edges = it[-1]
            hit = False
            for v in edges:
                w = pair_r[v]
                if w == -1:
                    chain.append((u, v))
                    for uu, vv in chain:
                        pair_l[uu] = vv
                        pair_r[vv] = uu
                    return True
                if dist[w] == dist[u] + 1:
                    chain.append((u, v))
                    it.append((w, iter(b.adj[w])))
                    hit = True
                    break
            if not hit:
                dist[u] = _INF
                it.pop()
                if chain:
                    chain.pop()
        return False

    # greedy warm start saves most augmentation phases on dense instances
    for u in range(b.n_left):
        for v in b.adj[u]:
            if pair_r[v] == -1:
                pair_l[u] = v
                pair_r[v] = u
                break

    while bfs():
        for u in range(b.n_left):
            if pair_l[u] == -1 and dfs(u):
                pass
    return pair_l, pair_r


def max_matching(b: BipartiteGraph) -> tuple[list[tuple[int, int]], int]:
    """A maximum-cardinality matching as (left, right) pairs, plus its size."""
    pair_l, _ = _hopcroft_karp(b)
    pairs = [(u, v) for u, v in enumerate(pair_l) if v != -1]
    return pairs, len(pairs)


def hall_violator(b: BipartiteGraph) -> set[int] | None:
    """None iff a left-saturating matching exists, else a deficient left set.

    The witness is the set of left vertices reachable by alternating paths
    from some unmatched left vertex in the final matching: for that set S,
    N(S) is fully matched into S, so |N(S)| = |S| - (#unmatched roots) < |S|.
    """
    pair_l, pair_r = _hopcroft_karp(b)
    free = [u for u, v in enumerate(pair_l) if v == -1]
    if not free:
        return None
    seen_l: set[int] = set(free)
    seen_r: set[int] = set()
    q = deque(free)
    while q:
        u = q.popleft()
        for v in b.adj[u]:
            if v in seen_r:
                continue
            seen_r.add(v)
            w = pair_r[v]
            if w != -1 and w not in seen_l:
                seen_l.add(w)
                q.append(w)
    return seen_l


def inter_cell_matchings(g, groups: dict[int, np.ndarray],
                         pairs: list[tuple[int, int]]) -> dict[tuple[int, int], np.ndarray]:
    """Perfect matchings between the groups of each requested cell pair.

    Only realized (post-percolation) edges of ``g`` are used.  Raises
    MissingTransferMatching with the Hall violator as a diagnostic when some
    pair has no perfect matching.
    """
    out: dict[tuple[int, int], np.ndarray] = {}
    for ca, cb in pairs:
        left = np.asarray(groups[ca], dtype=np.int64)
        right = np.asarray(groups[cb], dtype=np.int64)
        if len(left) != len(right):
            raise MissingTransferMatching(ca, cb, f"group sizes differ ({len(left)} vs {len(right)})")
        right_index = {int(v): j for j, v in enumerate(right)}
        adj: list[list[int]] = []
        for u in left:
            row = [right_index[int(w)] for w in g.neighbors(int(u)) if int(w) in right_index]
            adj.append(row)
        b = BipartiteGraph(n_left=len(left), n_right=len(right), adj=adj)
        violator = hall_violator(b)
        if violator is not None:
            raise MissingTransferMatching(
                ca, cb, f"Hall violator of size {len(violator)}: {sorted(violator)[:8]}")
        pair_l, _ = _hopcroft_karp(b)
        m = np.stack([left, right[np.asarray(pair_l, dtype=np.int64)]], axis=1)
        out[(ca, cb)] = m
    return out


@dataclass(frozen=True)
class GridMatchingCover:
    """Four matchings whose disjoint union is the full m1 x m2 grid edge set."""

    m1: int
    m2: int
    matchings: tuple[tuple[tuple[tuple[int, int], tuple[int, int]], ...], ...]

    def all_edges(self):
        return [e for m in self.matchings for e in m]


def grid_four_cover(m1: int, m2: int) -> GridMatchingCover:
    """Horizontal/vertical edges split by column/row parity of the left/top cell."""
    if m1 < 1 or m2 < 1:
        raise ValueError("grid dimensions must be >= 1")
    h_even, h_odd, v_even, v_odd = [], [], [], []
    for r in range(m1):
        for c in range(m2 - 1):
            (h_even if c % 2 == 0 else h_odd).append(((r, c), (r, c + 1)))
    for r in range(m1 - 1):
        for c in range(m2):
            (v_even if r % 2 == 0 else v_odd).append(((r, c), (r + 1, c)))
    return GridMatchingCover(
        m1=m1, m2=m2,
        matchings=(tuple(h_even), tuple(h_odd), tuple(v_even), tuple(v_odd)))
