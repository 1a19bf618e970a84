"""Shared machinery for the grid-tour strategies.

Both scaling strategies move equal-size traveling groups along a
boustrophedon Hamiltonian path of the dissection cells with brick-wall
(odd-even transposition) rounds.  One traversal makes every pair of groups
swap directly and takes every group through every cell; rotating the
traveler window across tours lets every agent travel at least once, which is
what the coverage argument needs.  The window size is the minimum cell
occupancy, so the paper's fixed 0.9*mu group size becomes instance-adaptive
(at desk scale the w.h.p. concentration bracket is routinely violated).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConcentrationFailed
from ..geometry import Dissection, GeometricGraph, dissect
from ..schedule import LocalPlan, TourSegment

__all__ = ["TourLayout", "build_layout", "window_slots", "canonical_transfers"]


class TourLayout:
    """Dissection plus the boustrophedon path and window-tour parameters."""

    def __init__(self, dissection: Dissection, cell_path: np.ndarray,
                 t: int, n_tours: int):
        self.dissection = dissection
        self.cell_path = cell_path
        self.t = t
        self.n_tours = n_tours

    @property
    def m(self) -> int:
        return self.dissection.m

    def universes(self) -> list[np.ndarray]:
        mem = self.dissection.members
        return [mem[int(c)] for c in self.cell_path]


def build_layout(g: GeometricGraph, c_cell: float,
                 bracket: tuple[float, float] | None = None) -> TourLayout:
    """Dissect, check occupancy, and fix the window size and tour count.

    ``bracket`` (lo, hi) demands every cell occupancy within
    [lo * mu, hi * mu]; None skips the check (the adaptive window only needs
    every cell nonempty).
    """
    d = dissect(g.points, c_cell, g.radius)
    counts = d.counts()
    mu = g.n / d.n_cells
    if bracket is not None:
        lo, hi = bracket[0] * mu, bracket[1] * mu
        for c, cnt in enumerate(counts):
            if not (lo <= cnt <= hi):
                raise ConcentrationFailed(c, int(cnt), (lo, hi))
    t = int(counts.min())
    if t < 1:
        empty = int(np.argmin(counts))
        raise ConcentrationFailed(empty, 0, (1, None))
    n_tours = int(math.ceil(counts.max() / t))
    m = d.m
    path_rc = []
    for r in range(m):
        rng = range(m) if r % 2 == 0 else range(m - 1, -1, -1)
        path_rc.extend((r, c) for c in rng)
    cell_path = np.array([r * m + c for r, c in path_rc], dtype=np.int64)
    return TourLayout(d, cell_path, t, n_tours)


def window_slots(layout: TourLayout, tour: int) -> np.ndarray:
    """(P, t) slot vertices: the rotating traveler window of each cell."""
    t = layout.t
    mem = layout.dissection.members
    slots = np.empty((len(layout.cell_path), t), dtype=np.int64)
    for i, c in enumerate(layout.cell_path):
        members = mem[int(c)]
        cnt = len(members)
        idx = (tour * t + np.arange(t)) % cnt
        slots[i] = members[idx]
    return slots


def canonical_transfers(slots: np.ndarray) -> list[np.ndarray]:
    """Slot-i-to-slot-i transfer matchings for consecutive path positions.
    Valid whenever consecutive cells are mutually in range (p = 1)."""
    out = []
    for e in range(len(slots) - 1):
        out.append(np.stack([slots[e], slots[e + 1]], axis=1))
    return out


def make_tour_segment(layout: TourLayout, slots: np.ndarray,
                      transfers: list[np.ndarray],
                      phase_plans: list[LocalPlan | None] | None = None) -> TourSegment:
    phase_universe = None
    if phase_plans is not None:
        phase_universe = [plan.universe if plan is not None else np.empty(0, np.int64)
                          for plan in phase_plans]
    return TourSegment(cells=layout.cell_path.copy(), slots=slots,
                       universe=layout.universes(), transfers=transfers,
                       phase_plans=phase_plans, phase_universe=phase_universe)
