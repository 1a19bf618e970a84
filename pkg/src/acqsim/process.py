"""The acquaintance process: state machine, exact oracles, trivial bound.

Timing convention: pairs on adjacent vertices before any swap are acquainted
at round 0; afterwards the relation is re-evaluated after each full round.
Two agents that swap across an edge were adjacent before the swap, so they
are acquainted automatically under this convention.

The acquaintance relation is stored agent-indexed (agents move, vertices do
not).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import Disconnected, Exceeded, InvalidMatching, NoEdges
from .geometry import GeometricGraph
from .schedule import Schedule

__all__ = [
    "ProcessState",
    "SimulationResult",
    "init_process",
    "apply_matching",
    "run_schedule",
    "trivial_lower_bound",
    "enumerate_matchings",
    "brute_force_ac",
    "brute_force_helicopter_ac",
]


@dataclass
class ProcessState:
    """Mutable single-owner process state: one agent per vertex."""

    agent_of: np.ndarray        # vertex -> agent
    vertex_of: np.ndarray       # agent -> vertex
    acquainted: np.ndarray      # (n, n) bool, symmetric, agent-indexed
    round: int = 0

    @property
    def n(self) -> int:
        return len(self.agent_of)

    def is_bijection(self) -> bool:
        return bool(np.array_equal(np.sort(self.agent_of), np.arange(self.n)))

    def acquainted_pairs(self) -> int:
        return int(np.count_nonzero(np.triu(self.acquainted, k=1)))

    def all_acquainted(self) -> bool:
        return self.acquainted_pairs() == comb(self.n, 2)


def init_process(g: GeometricGraph) -> ProcessState:
    """Agent i starts on vertex i; initially adjacent pairs are acquainted."""
    n = g.n
    acq = np.zeros((n, n), dtype=bool)
    if g.edge_count:
        acq[g.edges[:, 0], g.edges[:, 1]] = True
        acq[g.edges[:, 1], g.edges[:, 0]] = True
    return ProcessState(agent_of=np.arange(n, dtype=np.int64),
                        vertex_of=np.arange(n, dtype=np.int64),
                        acquainted=acq, round=0)


def _check_matching(g: GeometricGraph, m: np.ndarray, round_index: int | None = None):
    if len(m) == 0:
        return
    flat = m.reshape(-1)
    if flat.min() < 0 or flat.max() >= g.n:
        raise InvalidMatching("vertex id out of range", round_index)
    if len(np.unique(flat)) != len(flat):
        raise InvalidMatching("a vertex appears twice in the matching", round_index)
    for u, v in m:
        if not g.has_edge(int(u), int(v)):
            raise InvalidMatching(f"({u}, {v}) is not an edge", round_index)


def apply_matching(state: ProcessState, m, g: GeometricGraph,
                   round_index: int | None = None) -> ProcessState:
    """Swap agents across each matched edge, then grow the relation."""
    m = np.asarray(m, dtype=np.int64).reshape(-1, 2)
    _check_matching(g, m, round_index)
    u, v = m[:, 0], m[:, 1]
    au, av = state.agent_of[u].copy(), state.agent_of[v].copy()
    state.agent_of[u], state.agent_of[v] = av, au
    state.vertex_of[av], state.vertex_of[au] = u, v
    state.round += 1
    moved = m.reshape(-1)
    for w in moved:
        a = state.agent_of[w]
        nbr_agents = state.agent_of[g.neighbors(int(w))]
        state.acquainted[a, nbr_agents] = True
        state.acquainted[nbr_agents, a] = True
    return state


@dataclass
class SimulationResult:
    """Outcome of replaying a schedule."""

    total_rounds: int
    all_acquainted: bool
    first_complete_round: int | None
    unacquainted_pairs: list[tuple[int, int]] = field(default_factory=list)
    residual_truncated: bool = False

    def to_dict(self) -> dict:
        return {
            "total_rounds": self.total_rounds,
            "all_acquainted": self.all_acquainted,
            "first_complete_round": self.first_complete_round,
            "unacquainted_pairs": [[int(a), int(b)] for a, b in self.unacquainted_pairs],
            "residual_truncated": self.residual_truncated,
        }


def run_schedule(g: GeometricGraph, s: Schedule, engine: str = "auto",
                 witness_cap: int = 1000) -> SimulationResult:
    """Replay a schedule and report whether all agent pairs got acquainted.

    ``engine='exact'`` replays round by round (small instances).  For large
    structured schedules the certificate engine is used: it re-derives every
    structural claim from the schedule tables and the graph itself, certifies
    acquaintances in bulk, and adjudicates any uncovered pairs exactly.  For
    structured runs ``first_complete_round`` is not computed (reported None).
    """
    from .verify import verify_schedule  # local import: verify pulls in numba

    return verify_schedule(g, s, engine=engine, witness_cap=witness_cap)


def trivial_lower_bound(g: GeometricGraph) -> int:
    """ceil(C(n,2)/|E|) - 1: |E| pairs start acquainted and each round adds
    at most |E| new ones; integer rounds allow the ceiling."""
    if g.edge_count == 0:
        raise NoEdges("lower bound undefined on an edgeless graph")
    return -(-comb(g.n, 2) // g.edge_count) - 1


def enumerate_matchings(g: GeometricGraph):
    """Every nonempty matching of g exactly once (singletons included)."""
    edges = [(int(u), int(v)) for u, v in g.edges]

    def rec(idx: int, used: set[int], chosen: list[tuple[int, int]]):
        if idx == len(edges):
            if chosen:
                yield list(chosen)
            return
        u, v = edges[idx]
        if u not in used and v not in used:
            chosen.append((u, v))
            used.add(u)
            used.add(v)
            yield from rec(idx + 1, used, chosen)
            chosen.pop()
            used.remove(u)
            used.remove(v)
        yield from rec(idx + 1, used, chosen)

    yield from rec(0, set(), [])


def _pair_index(n: int):
    idx = {}
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            idx[(i, j)] = k
            k += 1
    return idx


def _initial_mask(g: GeometricGraph, pair_idx) -> int:
    mask = 0
    for u, v in g.edges:
        a, b = int(min(u, v)), int(max(u, v))
        mask |= 1 << pair_idx[(a, b)]
    return mask


def brute_force_ac(g: GeometricGraph, round_cap: int | None = None) -> int:
    """Exact acquaintance time by BFS over (placement, relation) states.

    State space is n! * 2^C(n,2); practical for n <= 6.  BFS layers are
    rounds; transitions are all nonempty matchings (the empty matching never
    helps since the relation is monotone).
    """
    n = g.n
    if n > 7:
        raise ValueError(f"brute force limited to n <= 7, got {n}")
    if n <= 1:
        return 0
    if g.edge_count == 0:
        raise NoEdges("acquaintance time undefined without edges")
    if not g.is_connected():
        raise Disconnected("acquaintance time is infinite on a disconnected graph")
    pair_idx = _pair_index(n)
    full = (1 << (n * (n + 1) // 2 - n)) - 1
    start_mask = _initial_mask(g, pair_idx)
    if start_mask == full:
        return 0
    matchings = [tuple(m2) for m2 in enumerate_matchings(g)]
    adj = [tuple(int(w) for w in g.neighbors(v)) for v in range(n)]

    start = (tuple(range(n)), start_mask)
    frontier = [start]
    seen = {start}
    rounds = 0
    while frontier:
        rounds += 1
        if round_cap is not None and rounds > round_cap:
            raise Exceeded(round_cap)
        nxt = []
        for agent_of, mask in frontier:
            for m in matchings:
                state = list(agent_of)
                for u, v in m:
                    state[u], state[v] = state[v], state[u]
                new_mask = mask
                for u, v in m:
                    for w in adj[u]:
                        a, b = state[u], state[w]
                        new_mask |= 1 << pair_idx[(min(a, b), max(a, b))]
                    for w in adj[v]:
                        a, b = state[v], state[w]
                        new_mask |= 1 << pair_idx[(min(a, b), max(a, b))]
                if new_mask == full:
                    return rounds
                key = (tuple(state), new_mask)
                if key not in seen:
                    seen.add(key)
                    nxt.append(key)
        frontier = nxt
    raise Disconnected("state space exhausted without acquainting all pairs")


def brute_force_helicopter_ac(g: GeometricGraph) -> int:
    """Exact helicopter acquaintance time for n <= 4.

    With helicopters every round is an arbitrary placement, so the answer is
    (minimum number of placements of g whose adjacent-pair sets cover all
    C(n,2) agent pairs) - 1.
    """
    n = g.n
    if n > 4:
        raise ValueError(f"helicopter brute force limited to n <= 4, got {n}")
    if n <= 1:
        return 0
    if g.edge_count == 0:
        raise NoEdges("helicopter acquaintance time undefined without edges")
    pair_idx = _pair_index(n)
    full = (1 << len(pair_idx)) - 1
    edges = [(int(u), int(v)) for u, v in g.edges]
    masks = set()
    for perm in itertools.permutations(range(n)):
        mask = 0
        for u, v in edges:
            a, b = perm[u], perm[v]
            mask |= 1 << pair_idx[(min(a, b), max(a, b))]
        masks.add(mask)
    masks = sorted(masks)
    for k in range(1, len(pair_idx) + 1):
        for combo in itertools.combinations(masks, k):
            acc = 0
            for m in combo:
                acc |= m
            if acc == full:
                return k - 1
    raise Disconnected("no placement cover exists")
