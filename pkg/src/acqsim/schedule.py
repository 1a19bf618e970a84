"""Schedules: ordered matching sequences with provenance.

A Schedule is a list of segments.  Small schedules use ExplicitSegment (a
plain list of matchings).  The large strategy compilers emit TourSegment,
which generates its rounds on demand from compact tables: a brick-wall
(odd-even transposition) walk of equal-size groups along a Hamiltonian path
of grid cells, with optional local acquainting phases after each grid move.
Materializing such schedules would take tens of gigabytes; the segment form
is a few megabytes and lets the verifier exploit the structure.

Vertex-level matchings are (k, 2) int64 arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import ConfigError

__all__ = [
    "Matching",
    "LocalPlan",
    "Segment",
    "ExplicitSegment",
    "TourSegment",
    "Schedule",
    "brick_pairs",
    "oet_rounds_for_path",
    "local_plan_rounds",
]

Matching = np.ndarray  # (k, 2) int64 vertex pairs

_MATERIALIZE_LIMIT = 2_000_000  # total swap entries allowed in to_json/materialize


def as_matching(pairs) -> Matching:
    m = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return m


def brick_pairs(length: int, parity: int) -> list[tuple[int, int]]:
    """Position pairs (i, i+1) of the brick-wall round with the given parity."""
    start = parity % 2
    return [(i, i + 1) for i in range(start, length - 1, 2)]


def oet_rounds_for_path(path_vertices: np.ndarray, n_rounds: int) -> list[Matching]:
    """Odd-even transposition matchings along a fixed vertex path."""
    p = np.asarray(path_vertices, dtype=np.int64)
    out = []
    for tau in range(n_rounds):
        pairs = brick_pairs(len(p), tau)
        out.append(as_matching([(p[i], p[j]) for i, j in pairs]))
    return out


@dataclass(frozen=True)
class LocalPlan:
    """Team strategy on one induced subgraph: the schedule certifying its
    acquaintance time.

    Rounds: 2k team rounds (odd-even transposition inside each consecutive
    k-block of the path), then, when off-path vertices exist, one swap-in
    round followed by another 2k team rounds.
    """

    universe: np.ndarray          # all vertex ids of the subgraph
    path: np.ndarray              # trimmed path, length a multiple of team
    team: int                     # team size actually used (min(k, |path|))
    swap_in: np.ndarray           # (s, 2) matching (off_path, path) vertex pairs
    seed_used: int = 0

    @property
    def n_rounds(self) -> int:
        base = 2 * self.team
        return base if len(self.swap_in) == 0 else 2 * base + 1

    def rounds(self) -> list[Matching]:
        team_rounds = []
        for tau in range(2 * self.team):
            pairs = []
            for start in range(0, len(self.path), self.team):
                for i, j in brick_pairs(self.team, tau):
                    pairs.append((self.path[start + i], self.path[start + j]))
            team_rounds.append(as_matching(pairs))
        if len(self.swap_in) == 0:
            return team_rounds
        return team_rounds + [as_matching(self.swap_in)] + team_rounds


def local_plan_rounds(plan: LocalPlan) -> list[Matching]:
    return plan.rounds()


class Segment:
    """One homogeneous block of rounds."""

    @property
    def n_rounds(self) -> int:
        raise NotImplementedError

    def iter_matchings(self) -> Iterator[Matching]:
        raise NotImplementedError

    def reversed(self) -> "Segment":
        raise NotImplementedError

    def swap_entries(self) -> int:
        """Total number of matched pairs across all rounds (for size guards)."""
        raise NotImplementedError


@dataclass
class ExplicitSegment(Segment):
    matchings: list[Matching]

    @property
    def n_rounds(self) -> int:
        return len(self.matchings)

    def iter_matchings(self) -> Iterator[Matching]:
        yield from self.matchings

    def reversed(self) -> "ExplicitSegment":
        return ExplicitSegment([m for m in reversed(self.matchings)])

    def swap_entries(self) -> int:
        return int(sum(len(m) for m in self.matchings))


@dataclass
class TourSegment(Segment):
    """One full brick-wall traversal of equal-size groups along a cell path.

    Grid round tau (0 <= tau < 2P) simultaneously swaps the groups sitting on
    path positions (i, i+1) for all bricks i of parity tau, using the fixed
    vertex-level transfer matchings.  When ``phase_plans`` is set, each grid
    round is followed by the local plan of every matched edge, played forward
    and then mirrored (so each phase block returns all agents to where the
    block found them).  Over the 2P grid rounds every pair of groups swaps
    directly at least once and every group visits every position; the
    traversal itself is a net identity.  These three facts are re-derived by
    the verifier per run, never assumed.
    """

    cells: np.ndarray                       # (P,) cell ids along the path (metadata)
    slots: np.ndarray                       # (P, t) vertex ids holding the groups
    universe: list[np.ndarray]              # (P,) full vertex set of each cell
    transfers: list[np.ndarray]             # (P-1,) perfect matchings slots[i] <-> slots[i+1]
    phase_plans: Optional[list[Optional[LocalPlan]]] = None  # (P-1,) per path edge
    phase_universe: Optional[list[np.ndarray]] = None        # (P-1,) vertex set of each phase
    reverse: bool = False
    _phase_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_positions(self) -> int:
        return len(self.cells)

    @property
    def n_grid_rounds(self) -> int:
        return 2 * self.n_positions

    def _phase_block_len(self, edge: int) -> int:
        if self.phase_plans is None or self.phase_plans[edge] is None:
            return 0
        return 2 * self.phase_plans[edge].n_rounds

    @property
    def max_phase_block(self) -> int:
        if self.phase_plans is None:
            return 0
        return max((self._phase_block_len(e) for e in range(len(self.transfers))), default=0)

    @property
    def n_rounds(self) -> int:
        return self.n_grid_rounds * (1 + self.max_phase_block)

    def swap_entries(self) -> int:
        total = 0
        for tau in range(self.n_grid_rounds):
            edges = [i for i, _ in brick_pairs(self.n_positions, tau)]
            total += sum(len(self.transfers[i]) for i in edges)
            if self.phase_plans is not None:
                for i in edges:
                    plan = self.phase_plans[i]
                    if plan is not None:
                        total += 2 * sum(len(m) for m in self._plan_rounds(i))
        return total

    def _plan_rounds(self, edge: int) -> list[Matching]:
        if edge not in self._phase_cache:
            self._phase_cache[edge] = self.phase_plans[edge].rounds()
        return self._phase_cache[edge]

    def _block(self, tau: int) -> list[Matching]:
        """Rounds of grid move tau: transfer round, then padded phase rounds."""
        edges = [i for i, _ in brick_pairs(self.n_positions, tau)]
        transfer = (np.concatenate([self.transfers[i] for i in edges])
                    if edges else np.empty((0, 2), dtype=np.int64))
        rounds = [transfer]
        width = self.max_phase_block
        if width:
            half = width // 2
            forward: list[list[np.ndarray]] = [[] for _ in range(half)]
            for i in edges:
                plan = self.phase_plans[i] if self.phase_plans else None
                if plan is None:
                    continue
                for j, m in enumerate(self._plan_rounds(i)):
                    forward[j].append(m)
            fwd = [np.concatenate(parts) if parts else np.empty((0, 2), np.int64)
                   for parts in forward]
            rounds.extend(fwd)
            rounds.extend(reversed(fwd))
        return rounds

    def iter_matchings(self) -> Iterator[Matching]:
        taus = range(self.n_grid_rounds)
        if not self.reverse:
            for tau in taus:
                yield from self._block(tau)
        else:
            for tau in reversed(taus):
                yield from reversed(self._block(tau))

    def reversed(self) -> "TourSegment":
        return TourSegment(cells=self.cells, slots=self.slots, universe=self.universe,
                           transfers=self.transfers, phase_plans=self.phase_plans,
                           phase_universe=self.phase_universe, reverse=not self.reverse)


@dataclass
class Schedule:
    """An ordered sequence of matchings plus provenance metadata.

    A schedule is the certificate a strategy emits: replaying it against the
    generating graph witnesses an upper bound on the acquaintance time.
    """

    segments: list[Segment]
    strategy_name: str = ""
    params: dict = field(default_factory=dict)

    @property
    def n_rounds(self) -> int:
        return sum(seg.n_rounds for seg in self.segments)

    def __len__(self) -> int:
        return self.n_rounds

    def iter_matchings(self) -> Iterator[Matching]:
        for seg in self.segments:
            yield from seg.iter_matchings()

    def swap_entries(self) -> int:
        return sum(seg.swap_entries() for seg in self.segments)

    def materialize(self) -> list[Matching]:
        if self.swap_entries() > _MATERIALIZE_LIMIT:
            raise ConfigError(
                f"schedule too large to materialize ({self.swap_entries()} swap entries); "
                "keep it in segment form")
        return list(self.iter_matchings())

    def reversed(self) -> "Schedule":
        return Schedule(segments=[seg.reversed() for seg in reversed(self.segments)],
                        strategy_name=self.strategy_name,
                        params=dict(self.params))

    def __add__(self, other: "Schedule") -> "Schedule":
        return Schedule(segments=self.segments + other.segments,
                        strategy_name=self.strategy_name,
                        params=dict(self.params))

    @classmethod
    def from_matchings(cls, matchings, strategy_name: str = "", params: dict | None = None) -> "Schedule":
        seg = ExplicitSegment([as_matching(m) for m in matchings])
        return cls(segments=[seg], strategy_name=strategy_name, params=params or {})

    def to_json(self) -> str:
        matchings = self.materialize()
        payload = {
            "strategy": self.strategy_name,
            "params": _json_safe(self.params),
            "matchings": [[[int(u), int(v)] for u, v in m] for m in matchings],
        }
        return json.dumps(payload, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        payload = json.loads(text)
        return cls.from_matchings(
            [as_matching(m) for m in payload["matchings"]],
            strategy_name=payload.get("strategy", ""),
            params=payload.get("params", {}))


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def reverse_and_append(s: Schedule) -> Schedule:
    """The schedule followed by its mirror: same acquaintances, and replaying
    the result returns every agent to its starting vertex (each matching is an
    involution, so the mirrored half undoes the first half move by move)."""
    out = s + s.reversed()
    out.strategy_name = s.strategy_name
    out.params = dict(s.params)
    return out
