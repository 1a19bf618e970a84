"""Team strategy for dense random(-ish) subgraphs.

Phases: find a long path greedily, split it into consecutive teams of k
agents, rotate every team simultaneously (all pairs inside a team meet;
cross-team and off-path pairs rely on the independently-present edges), then
swap the off-path agents onto the path through a saturating matching and
rotate once more.  Success is decided by exact simulation, never assumed.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import NoSaturatingMatching, NotAllAcquainted, PathTooShort
from ..geometry import GeometricGraph
from ..matching import BipartiteGraph, hall_violator, max_matching
from ..rng import substream
from ..schedule import LocalPlan, Schedule
from .core import StrategyReport

__all__ = ["build_team_plan", "gnp_pair_schedule", "PairTeamStrategy"]


def _greedy_long_path(adj: list[np.ndarray], nu: int,
                      rng: np.random.Generator, target: int, restarts: int) -> list[int]:
    """Longest-found greedy path in local indices, random next-steps."""
    best: list[int] = []
    for _ in range(restarts):
        start = int(rng.integers(nu))
        path = [start]
        seen = np.zeros(nu, dtype=bool)
        seen[start] = True
        while True:
            options = adj[path[-1]]
            options = options[~seen[options]]
            if len(options) == 0:
                break
            nxt = int(options[int(rng.integers(len(options)))])
            path.append(nxt)
            seen[nxt] = True
        if len(path) > len(best):
            best = path
        if len(best) >= target:
            break
    return best


def build_team_plan(g: GeometricGraph, universe: np.ndarray, k: int,
                    rng: np.random.Generator, restarts: int = 10,
                    target_frac: float = 0.9, floor_frac: float = 0.8) -> LocalPlan:
    """A LocalPlan for the induced subgraph on ``universe``.

    Raises PathTooShort when the greedy search stalls below floor_frac, and
    NoSaturatingMatching when the off-path agents cannot all be matched onto
    the path.
    """
    universe = np.sort(np.asarray(universe, dtype=np.int64))
    nu = len(universe)
    if nu == 0:
        raise PathTooShort("empty universe")
    # local-index adjacency restricted to the universe, computed once
    adj = [np.searchsorted(universe, g.neighbors_within(int(v), universe))
           for v in universe]
    target = max(1, int(np.ceil(target_frac * nu)))
    path_loc = _greedy_long_path(adj, nu, rng, target, restarts)
    if len(path_loc) < max(1, int(np.floor(floor_frac * nu))):
        raise PathTooShort(f"best greedy path has {len(path_loc)} of {nu} vertices")
    team = min(int(k), len(path_loc))
    trimmed = (len(path_loc) // team) * team
    path_loc = path_loc[:trimmed]
    path_arr = universe[np.asarray(path_loc, dtype=np.int64)]
    on_path = np.zeros(nu, dtype=bool)
    on_path[path_loc] = True
    off = universe[~on_path]
    if len(off) == 0:
        swap_in = np.empty((0, 2), dtype=np.int64)
    else:
        pos_of_loc = np.full(nu, -1, dtype=np.int64)
        pos_of_loc[path_loc] = np.arange(len(path_loc))
        adj_rows = []
        for v_loc in np.nonzero(~on_path)[0]:
            row = pos_of_loc[adj[v_loc]]
            adj_rows.append([int(x) for x in row[row >= 0]])
        b = BipartiteGraph(n_left=len(off), n_right=len(path_arr), adj=adj_rows)
        violator = hall_violator(b)
        if violator is not None:
            raise NoSaturatingMatching(
                f"{len(violator)} off-path vertices cannot be matched onto the path")
        pairs, _ = max_matching(b)
        swap_in = np.array([[off[i], path_arr[j]] for i, j in pairs], dtype=np.int64)
    return LocalPlan(universe=universe, path=path_arr, team=team, swap_in=swap_in)


def gnp_pair_schedule(h: GeometricGraph, k: int, seed: int,
                      retries: int = 3) -> StrategyReport:
    """Compile, verify, and report the team strategy on the whole graph h.

    Retries with fresh path-search seeds before surfacing NotAllAcquainted.
    """
    from ..verify import verify_schedule

    universe = np.arange(h.n, dtype=np.int64)
    last_exc: Exception | None = None
    for attempt in range(max(1, retries)):
        rng = substream(seed, "team-plan", attempt)
        try:
            plan = build_team_plan(h, universe, k, rng)
        except (PathTooShort, NoSaturatingMatching) as exc:
            last_exc = exc
            continue
        schedule = Schedule.from_matchings(
            plan.rounds(), strategy_name="pair-team",
            params={"k": k, "team": plan.team, "seed": seed, "attempt": attempt})
        result = verify_schedule(h, schedule, engine="exact")
        if result.all_acquainted:
            return StrategyReport(schedule=schedule, rounds=result.total_rounds,
                                  bound_ratio=result.total_rounds / max(1, 6 * k),
                                  retries=attempt,
                                  details={"team": plan.team,
                                           "path_len": len(plan.path),
                                           "off_path": len(plan.swap_in)})
        last_exc = NotAllAcquainted(result.unacquainted_pairs)
    if last_exc is None:
        raise PathTooShort("no attempt was made")
    raise last_exc


class PairTeamStrategy(BaseEstimator):
    """Estimator-style wrapper: fit(h) compiles the team strategy."""

    def __init__(self, k: int = 16, seed: int = 0, retries: int = 3):
        self.k = k
        self.seed = seed
        self.retries = retries

    def fit(self, h: GeometricGraph, y=None):
        self.report_ = gnp_pair_schedule(h, self.k, self.seed, self.retries)
        self.schedule_ = self.report_.schedule
        return self
