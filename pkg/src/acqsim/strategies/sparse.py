"""Strategy for the near-threshold regime, driven by structural analysis.

Every vertex belongs to exactly one A(c): the points of a main-component
cell, plus stray safe points assigned to their witness cell, plus
obstruction members assigned where their crucial vertices point.  Each
A(c) is split into classes; for every class pair the strategy routes those
agents into their cells (safe agents hop straight in, obstruction agents
hop through crucial vertices), selects equal-size B(c) blocks holding them,
and tours the main component's cells-graph with the blocks as groups, via a
Hamiltonian path when the boustrophedon order survives the bad cells and a
spanning-tree walk otherwise.  The pass is mirrored so everyone returns
home before the next class pair.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree as _mst
from sklearn.base import BaseEstimator

from ..errors import (CapacityExceeded, MoveFailed, NoCrucialPath, NotAllAcquainted,
                      StructureUnusable)
from ..geometry import CORNER_RULE, GeometricGraph
from ..matching import BipartiteGraph, hall_violator, max_matching
from ..schedule import Schedule, as_matching, oet_rounds_for_path
from ..structure import SAFE, StructureAnalysis, analyze, assign_and_partition
from .core import StrategyReport, Tree, tree_walk_schedule

__all__ = ["SparseStrategy", "sparse_schedule", "move_into_cell"]


def _hk_assign(g: GeometricGraph, sources: list[int], targets: list[int]):
    """Perfect matching of every source onto a distinct adjacent target."""
    tindex = {int(v): j for j, v in enumerate(targets)}
    adj = [[tindex[int(w)] for w in g.neighbors(int(v)) if int(w) in tindex]
           for v in sources]
    b = BipartiteGraph(n_left=len(sources), n_right=len(targets), adj=adj)
    if hall_violator(b) is not None:
        return None
    pairs, _ = max_matching(b)
    return [(sources[i], targets[j]) for i, j in pairs]


def _move_plan(g: GeometricGraph, a_prime: np.ndarray, c: int,
               analysis: StructureAnalysis):
    """Rounds placing the agents of a_prime on vertices of cell c.

    Returns (rounds, final_vertex_of_agent).  Safe agents hop in directly;
    obstruction members go through crucial vertices targeting c, two rounds
    per part.  Everyone starts at home, so agents are named by vertices.
    """
    d = analysis.cell_graph.dissection
    labels = analysis.classification.labels
    v_c = set(int(x) for x in d.members[c])
    a_set = set(int(x) for x in a_prime)
    final: dict[int, int] = {v: v for v in a_set if v in v_c}
    todo = sorted(a_set - v_c)
    free = sorted(v_c - a_set)
    if len(todo) > len(free):
        raise CapacityExceeded(
            f"cell {c} has {len(free)} free vertices for {len(todo)} movers")
    rounds: list[np.ndarray] = []
    if not todo:
        return rounds, final
    safe_movers = [v for v in todo if labels[v] == SAFE]
    obstruction_movers = [v for v in todo if labels[v] != SAFE]
    if safe_movers:
        got = _hk_assign(g, safe_movers, free)
        if got is None:
            raise MoveFailed(f"safe movers of cell {c} cannot all hop in")
        rounds.append(as_matching(got))
        for src, dst in got:
            final[src] = dst
            free.remove(dst)
    if obstruction_movers:
        by_obs: dict[int, list[int]] = {}
        for v in obstruction_movers:
            for oi, o in enumerate(analysis.obstructions):
                if v in set(int(x) for x in o.members):
                    by_obs.setdefault(oi, []).append(v)
                    break
            else:
                raise MoveFailed(f"mover {v} is neither safe nor in an obstruction")
        assignment = analysis.assignment
        cell_of = d.cell_of
        for oi, members in sorted(by_obs.items()):
            crucial_all = [int(v) for v in analysis.obstructions[oi].crucial
                           if assignment.get(int(v), int(cell_of[v])) == c
                           and int(v) not in a_set]
            start = 0
            while start < len(members):
                placed = set(final.values())
                crucial = [h for h in crucial_all if h not in placed]
                if not crucial:
                    raise NoCrucialPath(
                        f"obstruction {oi} has no usable crucial vertex targeting cell {c}")
                part = members[start:start + len(crucial)]
                start += len(part)
                hop = crucial[: len(part)]
                rounds.append(as_matching(list(zip(part, hop))))
                # second hop into the cell, off the crucial vertices, so the
                # same crucial vertices can serve the next part
                landing = [v for v in free if v not in set(hop)]
                got = _hk_assign(g, hop, landing)
                if got is None:
                    raise NoCrucialPath(
                        f"crucial hop of obstruction {oi} cannot land in cell {c}")
                rounds.append(as_matching(got))
                hop_to_src = {h: src for src, h in zip(part, hop)}
                for h, dst in got:
                    final[hop_to_src[h]] = dst
                    free.remove(dst)
    return rounds, final


def move_into_cell(g: GeometricGraph, a_prime, c: int,
                   analysis: StructureAnalysis) -> Schedule:
    """Schedule fragment placing the agents of a_prime on vertices of c."""
    rounds, _ = _move_plan(g, np.asarray(a_prime, dtype=np.int64), int(c), analysis)
    return Schedule.from_matchings(rounds, strategy_name="move-into-cell",
                                   params={"cell": int(c)})


def _boustrophedon_cells(m: int) -> list[int]:
    out = []
    for r in range(m):
        rng = range(m) if r % 2 == 0 else range(m - 1, -1, -1)
        out.extend(r * m + c for c in rng)
    return out


def _cells_base_schedule(analysis: StructureAnalysis, force_tree: bool):
    """Schedule on the cells-graph (vertices are cell ids) touring Gamma_max,
    plus the list of cell-pair edges it uses.

    Tries the boustrophedon order restricted to the good cells first; if some
    consecutive pair is not adjacent under the cells-graph rule, falls back
    to a walk of a spanning tree of Gamma_max.
    """
    d = analysis.cell_graph.dissection
    gamma = [int(c) for c in analysis.cell_graph.gamma_max]
    gamma_set = set(gamma)
    order = [c for c in _boustrophedon_cells(d.m) if c in gamma_set]
    ham_ok = not force_tree and all(
        d.cells_adjacent(order[i], order[i + 1]) for i in range(len(order) - 1))
    if ham_ok:
        return Schedule.from_matchings(oet_rounds_for_path(np.array(order), 2 * len(order)),
                                       strategy_name="cells-path")
    # spanning tree of the cells-graph, weighted by center distance
    index = {c: i for i, c in enumerate(gamma)}
    rows, cols, w = [], [], []
    half = d.side / 2.0
    centers = {c: ((c % d.m) * d.side + half, (c // d.m) * d.side + half) for c in gamma}
    for c in gamma:
        for nb in d.adjacent_cells(c):
            if nb in gamma_set and c < nb:
                rows.append(index[c])
                cols.append(index[nb])
                dx = centers[c][0] - centers[nb][0]
                dy = centers[c][1] - centers[nb][1]
                w.append(max((dx * dx + dy * dy) ** 0.5, 1e-12))
    mst = _mst(coo_matrix((w, (rows, cols)), shape=(len(gamma), len(gamma)))).tocoo()
    adj: list[list[int]] = [[] for _ in gamma]
    for a, b in zip(mst.row, mst.col):
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    parent = np.full(len(gamma), -2, dtype=np.int64)
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
    if seen != len(gamma):
        raise StructureUnusable("main component of the cells-graph is not connected")
    tree = Tree(parent=parent, root=0)
    walk = tree_walk_schedule(tree)  # tree-index space, remapped to cell ids below
    remap = np.array(gamma, dtype=np.int64)
    rounds = [np.stack([remap[m[:, 0]], remap[m[:, 1]]], axis=1) if len(m) else m
              for m in walk.iter_matchings()]
    return Schedule.from_matchings(rounds, strategy_name="cells-tree-walk")


class SparseStrategy(BaseEstimator):
    """Compile and verify the structural strategy near the threshold.

    Parameters mirror the analyzer (eta, delta, separation_factor, rule,
    default corner rule so cells-graph adjacency certifies range), plus
    class_frac for the A(c) class size cap and force_tree to skip the
    Hamiltonian repair.  fit(g, analysis=...) accepts a precomputed analysis.
    """

    def __init__(self, eta: float = 1.0, delta: float = 0.5,
                 separation_factor: float = 10.0, rule: str = CORNER_RULE,
                 class_frac: float = 1.0, force_tree: bool = False,
                 engine: str = "auto"):
        self.eta = eta
        self.delta = delta
        self.separation_factor = separation_factor
        self.rule = rule
        self.class_frac = class_frac
        self.force_tree = force_tree
        self.engine = engine

    def fit(self, g: GeometricGraph, y=None, analysis: StructureAnalysis | None = None):
        from ..verify import verify_schedule

        if analysis is None:
            analysis = analyze(g, eta=self.eta, delta=self.delta,
                               separation_factor=self.separation_factor, rule=self.rule)
        if not analysis.properties["P1"][0]:
            raise StructureUnusable(f"P1 fails: {analysis.properties['P1'][1]}")
        for o in analysis.obstructions:
            if len(o.crucial) == 0:
                raise StructureUnusable(
                    f"obstruction of kind {o.kind}, size {o.size} has no crucial vertex")
        if not analysis.a_sets:
            assign_and_partition(analysis, class_frac=self.class_frac)
        covered = sum(len(m) for m in analysis.a_sets.values())
        if covered != g.n:
            raise StructureUnusable(
                f"A-sets cover {covered} of {g.n} vertices")
        d = analysis.cell_graph.dissection
        n_classes = max(len(parts) for parts in analysis.a_partition.values())
        cap = max(len(p) for parts in analysis.a_partition.values() for p in parts)
        b_size = max(int(np.ceil(analysis.threshold)), 2 * cap, 1)
        smallest = min(len(d.members[int(c)]) for c in analysis.cell_graph.gamma_max)
        if b_size > smallest:
            raise CapacityExceeded(
                f"block size {b_size} exceeds the smallest main-component cell ({smallest})")
        base = _cells_base_schedule(analysis, self.force_tree)
        pair_list = list(combinations(range(n_classes), 2)) if n_classes > 1 else [(0, 0)]
        segments: list[np.ndarray] = []
        for i, j in pair_list:
            frag_rounds: list[list[np.ndarray]] = []
            finals: dict[int, dict[int, int]] = {}
            for c, parts in analysis.a_partition.items():
                a_prime = np.concatenate([parts[x] for x in {i, j} if x < len(parts)]) \
                    if any(x < len(parts) for x in {i, j}) else np.empty(0, np.int64)
                rounds, final = _move_plan(g, a_prime, int(c), analysis)
                frag_rounds.append(rounds)
                finals[int(c)] = final
            depth = max((len(r) for r in frag_rounds), default=0)
            merged = []
            for level in range(depth):
                parts_here = [r[level] for r in frag_rounds if len(r) > level and len(r[level])]
                merged.append(np.concatenate(parts_here) if parts_here
                              else np.empty((0, 2), np.int64))
            blocks: dict[int, np.ndarray] = {}
            for c in analysis.a_partition:
                occupied = sorted(finals[int(c)].values())
                pad = [v for v in map(int, d.members[int(c)]) if v not in set(occupied)]
                block = (occupied + pad)[:b_size]
                if len(block) < b_size:
                    raise CapacityExceeded(f"cell {c} cannot host a block of {b_size}")
                blocks[int(c)] = np.array(block, dtype=np.int64)
            lift_rounds = []
            for m in base.iter_matchings():
                parts = [np.stack([blocks[int(a)], blocks[int(b)]], axis=1)
                         for a, b in m]
                lift_rounds.append(np.concatenate(parts) if parts
                                   else np.empty((0, 2), np.int64))
            pass_rounds = merged + lift_rounds
            segments.extend(pass_rounds)
            segments.extend(reversed([m for m in pass_rounds]))
        schedule = Schedule.from_matchings(
            segments, strategy_name="sparse",
            params={"n": g.n, "m": d.m, "classes": n_classes, "b_size": b_size,
                    "passes": len(pair_list), "base": base.strategy_name,
                    "eta": self.eta, "delta": self.delta})
        result = verify_schedule(g, schedule, engine=self.engine)
        if not result.all_acquainted:
            raise NotAllAcquainted(result.unacquainted_pairs)
        self.analysis_ = analysis
        self.schedule_ = schedule
        self.report_ = StrategyReport(
            schedule=schedule, rounds=result.total_rounds,
            bound_ratio=result.total_rounds / float(d.m ** 2),
            details={"m": d.m, "classes": n_classes, "b_size": b_size,
                     "base": base.strategy_name, "passes": len(pair_list)})
        return self


def sparse_schedule(g: GeometricGraph, analysis: StructureAnalysis | None = None,
                    **params) -> StrategyReport:
    """Functional wrapper around SparseStrategy."""
    return SparseStrategy(**params).fit(g, analysis=analysis).report_
