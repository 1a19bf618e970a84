"""Building-block strategies: path rotations, lifts, tree walks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree

from ..errors import Disconnected, MissingTransferMatching, NotAPath
from ..geometry import GeometricGraph
from ..schedule import Schedule, as_matching, oet_rounds_for_path

__all__ = [
    "Tree",
    "GroupMap",
    "StrategyReport",
    "hamiltonian_path_schedule",
    "grid_hamiltonian_path",
    "lift_schedule",
    "bounded_degree_spanning_tree",
    "tree_walk_schedule",
]


@dataclass
class Tree:
    """Rooted spanning tree as a parent map (root's parent is -1)."""

    parent: np.ndarray
    root: int

    @property
    def n(self) -> int:
        return len(self.parent)

    def edges(self) -> list[tuple[int, int]]:
        return [(int(self.parent[v]), v) for v in range(self.n) if self.parent[v] >= 0]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges():
            deg[u] += 1
            deg[v] += 1
        return deg

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n > 1 else 0

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for v in range(self.n):
            p = int(self.parent[v])
            if p >= 0:
                out[p].append(v)
        return out


@dataclass
class GroupMap:
    """Equal-size groups of host vertices keyed by base-graph vertex (cell)."""

    groups: dict[int, np.ndarray]
    group_size: int

    def __post_init__(self):
        seen: set[int] = set()
        for key, members in self.groups.items():
            members = np.asarray(members, dtype=np.int64)
            self.groups[key] = members
            if len(members) != self.group_size:
                raise ValueError(f"group {key} has size {len(members)} != {self.group_size}")
            ms = set(int(x) for x in members)
            if seen & ms:
                raise ValueError("groups are not disjoint")
            seen |= ms


@dataclass
class StrategyReport:
    """What a strategy certifies: the schedule, its length, and how the
    length compares with the theory target for the regime."""

    schedule: Schedule
    rounds: int
    bound_ratio: float
    retries: int = 0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "strategy": self.schedule.strategy_name,
            "rounds": self.rounds,
            "bound_ratio": self.bound_ratio,
            "retries": self.retries,
            "details": {k: v for k, v in self.details.items()},
        }


def hamiltonian_path_schedule(g: GeometricGraph, path_order) -> Schedule:
    """Brick-wall rotation along a Hamiltonian path: 2n rounds, after which
    every pair of agents has been adjacent and every agent has visited every
    vertex of the path (both facts are asserted by tests, not assumed)."""
    path = np.asarray(path_order, dtype=np.int64)
    n = len(path)
    if len(np.unique(path)) != n:
        raise NotAPath("path repeats a vertex")
    for i in range(n - 1):
        if not g.has_edge(int(path[i]), int(path[i + 1])):
            raise NotAPath(f"({path[i]}, {path[i + 1]}) is not an edge")
    if n <= 1:
        return Schedule.from_matchings([], strategy_name="hamiltonian-path",
                                       params={"n": n})
    return Schedule.from_matchings(oet_rounds_for_path(path, 2 * n),
                                   strategy_name="hamiltonian-path",
                                   params={"n": n})


def grid_hamiltonian_path(rows: int, cols: int) -> list[tuple[int, int]]:
    """Boustrophedon Hamiltonian path of the rows x cols grid graph."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be >= 1")
    out = []
    for r in range(rows):
        rng = range(cols) if r % 2 == 0 else range(cols - 1, -1, -1)
        out.extend((r, c) for c in rng)
    return out


def lift_schedule(base: Schedule, gm: GroupMap,
                  transfer: dict[tuple[int, int], np.ndarray]) -> Schedule:
    """Blow a base schedule up to the host graph: each base round becomes one
    host round, the union over matched base edges of that edge's group
    transfer matching.  Base edges are disjoint, so the union is a matching.
    """
    host_rounds = []
    for m in base.iter_matchings():
        parts = []
        for a, b in np.asarray(m, dtype=np.int64).reshape(-1, 2):
            key = (int(a), int(b))
            alt = (int(b), int(a))
            if key in transfer:
                tm = transfer[key]
            elif alt in transfer:
                tm = transfer[alt]
            else:
                raise MissingTransferMatching(int(a), int(b))
            tm = np.asarray(tm, dtype=np.int64).reshape(-1, 2)
            if len(tm) != gm.group_size:
                raise MissingTransferMatching(
                    int(a), int(b), f"transfer has {len(tm)} pairs, groups have {gm.group_size}")
            parts.append(tm)
        host_rounds.append(np.concatenate(parts) if parts else np.empty((0, 2), np.int64))
    return Schedule.from_matchings(host_rounds, strategy_name=f"lift({base.strategy_name})",
                                   params=dict(base.params))


def bounded_degree_spanning_tree(g: GeometricGraph) -> Tree:
    """Euclidean minimum spanning tree of the point set, as a rooted tree.

    When the geometric graph is connected, all its EMST edges have length at
    most r, so the EMST is a spanning tree of the graph; two EMST edges at a
    vertex subtend more than 60 degrees unless distances tie exactly, which
    bounds the degree by five for points in general position.
    """
    n = g.n
    if n == 0:
        raise Disconnected("empty graph has no spanning tree")
    if n == 1:
        return Tree(parent=np.array([-1], dtype=np.int64), root=0)
    if g.edge_count == 0 or not g.is_connected():
        raise Disconnected("graph is not connected")
    coords = g.points.coords
    u, v = g.edges[:, 0], g.edges[:, 1]
    w = np.sqrt(((coords[u] - coords[v]) ** 2).sum(axis=1))
    # strictly positive weights so csgraph never drops an edge as "absent"
    w = np.maximum(w, 1e-300)
    mat = coo_matrix((w, (u, v)), shape=(n, n))
    mst = minimum_spanning_tree(mat).tocoo()
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in zip(mst.row, mst.col):
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    parent = np.full(n, -2, dtype=np.int64)
    parent[0] = -1
    stack = [0]
    seen = 1
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if parent[y] == -2:
                parent[y] = x
                seen += 1
                stack.append(y)
    if seen != n:
        raise Disconnected("minimum spanning tree does not span (graph disconnected)")
    return Tree(parent=parent, root=0)


def _euler_tour(tree: Tree) -> list[int]:
    """Closed DFS tour visiting every tree edge twice, starting at the root."""
    children = tree.children()
    tour = [tree.root]
    stack: list[tuple[int, int]] = [(tree.root, 0)]
    while stack:
        v, k = stack.pop()
        kids = children[v]
        if k < len(kids):
            stack.append((v, k + 1))
            child = kids[k]
            tour.append(child)
            stack.append((child, 0))
        elif stack:
            tour.append(stack[-1][0])
    return tour


def tree_walk_schedule(tree: Tree) -> Schedule:
    """Sequential Euler-walk strategy on a spanning tree.

    One agent at a time walks the closed doubled-tree tour: each step swaps
    the walker with the occupant ahead, so the walker meets every agent and,
    because the tour's edge traversals nest, everyone else is back in place
    when the walk ends.  n - 1 walks acquaint all pairs in at most
    2(n-1)^2 <= 2n(n-1) rounds.
    """
    n = tree.n
    if n <= 1:
        return Schedule.from_matchings([], strategy_name="tree-walk", params={"n": n})
    tour = _euler_tour(tree)  # closed: tour[0] == tour[-1] == root
    if tour[0] != tour[-1]:
        tour.append(tree.root)
    body = tour[:-1]  # one occurrence stripped so rotations stay closed walks
    first_at = {}
    for idx, vtx in enumerate(body):
        first_at.setdefault(vtx, idx)
    rounds = []
    for s in sorted(first_at)[: n - 1]:
        start = first_at[s]
        rotated = body[start:] + body[:start] + [body[start]]
        for i in range(len(rotated) - 1):
            a, b = rotated[i], rotated[i + 1]
            rounds.append(as_matching([(a, b)]))
    sched = Schedule.from_matchings(rounds, strategy_name="tree-walk", params={"n": n})
    return sched
