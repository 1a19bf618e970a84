"""Strategy for percolated geometric graphs.

Same window tours as the dense strategy, but edges are no longer implied by
distance, so (a) group transfers between consecutive path cells are perfect
matchings found in the realized bipartite slot graphs, and (b) acquainting
happens in explicit local phases: after every grid move, the two cells of
each just-swapped pair run a team-strategy plan on their joint vertex set,
forward and mirrored.  Any two points of consecutive cells are within range,
so each joint vertex set induces an Erdos-Renyi-like percolated clique and
the team strategy applies with k on the order of ln(n)/p.  Total rounds:
O(m^2 k) = O(r^-2 p^-1 ln n).
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import (CellPairStrategyFailed, MatchingMissing, NoSaturatingMatching,
                      NotAllAcquainted, PathTooShort)
from ..geometry import GeometricGraph
from ..matching import BipartiteGraph, hall_violator, max_matching
from ..rng import substream
from ..schedule import LocalPlan, Schedule
from ..validation import require
from .core import StrategyReport
from .pairteam import build_team_plan
from .tours import TourLayout, build_layout, canonical_transfers, make_tour_segment, window_slots

__all__ = ["PercolatedStrategy", "percolated_schedule"]


def _slot_transfer(g: GeometricGraph, left: np.ndarray, right: np.ndarray,
                   cells: tuple[int, int]) -> np.ndarray:
    """Perfect matching between two slot sets using realized edges only."""
    rs = np.sort(right)
    rs_to_j = np.argsort(right, kind="stable")
    adj = []
    for u in left:
        hit = g.neighbors_within(int(u), rs)
        adj.append([int(rs_to_j[x]) for x in np.searchsorted(rs, hit)])
    b = BipartiteGraph(n_left=len(left), n_right=len(right), adj=adj)
    violator = hall_violator(b)
    if violator is not None:
        raise MatchingMissing(cells[0], cells[1],
                              f"Hall violator of size {len(violator)}")
    pairs, _ = max_matching(b)
    out = np.empty((len(left), 2), dtype=np.int64)
    for row, (i, j) in enumerate(pairs):
        out[row, 0] = left[i]
        out[row, 1] = right[j]
    return out


def _phase_plan(g: GeometricGraph, universe: np.ndarray, k: int, seed: int,
                edge_index: int, cells: tuple[int, int], retries: int):
    """A meet-complete LocalPlan for one cell pair, with fresh-seed retries.

    Completeness (the plan acquaints every pair of its universe, starting
    from the local adjacency) is checked by exact local replay here, so
    emitted schedules never carry a broken phase.
    """
    from ..verify import _check_plan  # shared local replay, memoized by the verifier

    last: Exception | None = None
    for attempt in range(max(1, retries)):
        rng = substream(seed, "phase", edge_index * 97 + attempt)
        try:
            plan = build_team_plan(g, universe, k, rng)
        except (PathTooShort, NoSaturatingMatching) as exc:
            last = exc
            continue
        if _check_plan(g, plan, {}, 0).complete:
            return plan, attempt
        last = NotAllAcquainted([("phase", edge_index)])
    raise CellPairStrategyFailed(cells[0], cells[1], str(last))


class PercolatedStrategy(BaseEstimator):
    """Compile and verify an all-pairs schedule for a percolated graph.

    Parameters
    ----------
    c_cell : grid granularity (see DenseStrategy).
    k : local acquaintance budget; None picks ceil(k_coef * ln n / p).
    k_coef : coefficient of the automatic k.
    retries : per-cell-pair plan retries before CellPairStrategyFailed.
    seed : master seed for path searches.

    Attributes (after fit): schedule_, report_, layout_, k_, m_, n_tours_.
    """

    def __init__(self, c_cell: float = 3.0, k: int | None = None, k_coef: float = 2.0,
                 retries: int = 3, seed: int = 0, engine: str = "auto"):
        self.c_cell = c_cell
        self.k = k
        self.k_coef = k_coef
        self.retries = retries
        self.seed = seed
        self.engine = engine

    def _effective_k(self, g: GeometricGraph) -> int:
        if self.k is not None:
            return int(self.k)
        return max(2, int(math.ceil(self.k_coef * math.log(max(g.n, 2)) / g.edge_prob)))

    def fit(self, g: GeometricGraph, y=None):
        from ..verify import verify_schedule

        require(g.n >= 2, ValueError, "need at least two vertices")
        layout = build_layout(g, self.c_cell)
        k = self._effective_k(g)
        pure_geometry = g.edge_prob == 1.0
        retries_used = 0

        phase_plans: list[LocalPlan | None] | None = None
        if not pure_geometry:
            phase_plans = []
            universes = layout.universes()
            for e in range(len(layout.cell_path) - 1):
                cells = (int(layout.cell_path[e]), int(layout.cell_path[e + 1]))
                joint = np.concatenate([universes[e], universes[e + 1]])
                plan, used = _phase_plan(g, joint, k, self.seed, e, cells, self.retries)
                retries_used += used
                phase_plans.append(plan)

        segments = []
        for tour in range(layout.n_tours):
            slots = window_slots(layout, tour)
            if pure_geometry:
                transfers = canonical_transfers(slots)
            else:
                transfers = []
                for e in range(len(layout.cell_path) - 1):
                    cells = (int(layout.cell_path[e]), int(layout.cell_path[e + 1]))
                    transfers.append(_slot_transfer(g, slots[e], slots[e + 1], cells))
            segments.append(make_tour_segment(layout, slots, transfers, phase_plans))
        schedule = Schedule(segments=segments, strategy_name="percolated",
                            params={"n": g.n, "p": g.edge_prob, "m": layout.m,
                                    "t": layout.t, "tours": layout.n_tours, "k": k,
                                    "seed": self.seed, "c_cell": self.c_cell})
        result = verify_schedule(g, schedule, engine=self.engine)
        if not result.all_acquainted:
            raise NotAllAcquainted(result.unacquainted_pairs)
        self.layout_ = layout
        self.k_ = k
        self.m_ = layout.m
        self.n_tours_ = layout.n_tours
        self.schedule_ = schedule
        self.report_ = StrategyReport(
            schedule=schedule, rounds=result.total_rounds,
            bound_ratio=result.total_rounds / float(layout.m ** 2 * k),
            retries=retries_used,
            details={"m": layout.m, "t": layout.t, "tours": layout.n_tours, "k": k})
        return self


def percolated_schedule(g: GeometricGraph, k: int | None = None, seed: int = 0,
                        c_cell: float = 3.0, retries: int = 3,
                        engine: str = "auto") -> StrategyReport:
    """Functional wrapper around PercolatedStrategy."""
    strat = PercolatedStrategy(c_cell=c_cell, k=k, retries=retries, seed=seed,
                               engine=engine)
    return strat.fit(g).report_
