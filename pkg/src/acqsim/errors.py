"""Typed failures raised across the package.

Strategy compilers never return silently-broken schedules: anything that
prevents a verified schedule surfaces as one of these.
"""

from __future__ import annotations

__all__ = [
    "AcqsimError",
    "RadiusOutOfRange",
    "InvalidMatching",
    "NoEdges",
    "Exceeded",
    "Disconnected",
    "NotAPath",
    "MissingTransferMatching",
    "MatchingMissing",
    "ConcentrationFailed",
    "PathTooShort",
    "NoSaturatingMatching",
    "NotAllAcquainted",
    "CellPairStrategyFailed",
    "StructureUnusable",
    "MoveFailed",
    "CapacityExceeded",
    "NoCrucialPath",
    "NoCrucial",
    "ConfigError",
]


class AcqsimError(Exception):
    """Base class for all package errors."""


class RadiusOutOfRange(AcqsimError):
    """Radius outside (0, sqrt(2))."""


class InvalidMatching(AcqsimError):
    """A matching reuses a vertex or uses a non-edge; signals a buggy strategy."""

    def __init__(self, message: str, round_index: int | None = None):
        super().__init__(message if round_index is None else f"round {round_index}: {message}")
        self.round_index = round_index


class NoEdges(AcqsimError):
    """Acquaintance time is undefined on an edgeless graph."""


class Exceeded(AcqsimError):
    """Brute-force search hit its round cap."""

    def __init__(self, round_cap: int):
        super().__init__(f"no solution within {round_cap} rounds")
        self.round_cap = round_cap


class Disconnected(AcqsimError):
    """The graph is disconnected where connectivity is required."""


class NotAPath(AcqsimError):
    """Consecutive vertices of the claimed path are not adjacent."""


class MissingTransferMatching(AcqsimError):
    """No perfect matching available between two groups that must swap."""

    def __init__(self, cell_a, cell_b, detail: str = ""):
        msg = f"no transfer matching between cells {cell_a} and {cell_b}"
        super().__init__(msg + (f": {detail}" if detail else ""))
        self.cells = (cell_a, cell_b)


class MatchingMissing(MissingTransferMatching):
    """Percolation deleted every usable inter-cell matching for a cell pair."""


class ConcentrationFailed(AcqsimError):
    """A cell's occupancy falls outside the configured concentration bracket."""

    def __init__(self, cell, count, bracket):
        super().__init__(f"cell {cell} holds {count} points, outside bracket {bracket}")
        self.cell = cell
        self.count = count
        self.bracket = bracket


class PathTooShort(AcqsimError):
    """Greedy long-path search failed to reach the required fraction."""


class NoSaturatingMatching(AcqsimError):
    """No matching saturating the off-path vertices exists."""


class NotAllAcquainted(AcqsimError):
    """A schedule left some agent pairs unacquainted."""

    def __init__(self, witnesses):
        self.witnesses = list(witnesses)
        shown = ", ".join(map(str, self.witnesses[:5]))
        more = "" if len(self.witnesses) <= 5 else f" (+{len(self.witnesses) - 5} more)"
        super().__init__(f"unacquainted pairs remain: {shown}{more}")


class CellPairStrategyFailed(AcqsimError):
    """A per-cell-pair sub-strategy failed after its retry budget."""

    def __init__(self, cell_a, cell_b, detail: str = ""):
        super().__init__(f"cell pair ({cell_a}, {cell_b}) strategy failed" + (f": {detail}" if detail else ""))
        self.cells = (cell_a, cell_b)


class StructureUnusable(AcqsimError):
    """The structural analysis does not support the sparse strategy."""


class MoveFailed(AcqsimError):
    """Routing agents into a target cell failed."""


class CapacityExceeded(AcqsimError):
    """A cell cannot host the agents that must be moved into it."""


class NoCrucialPath(AcqsimError):
    """An obstruction part has no free crucial vertices to route through."""


class NoCrucial(AcqsimError):
    """An obstruction has no crucial vertex at all."""


class ConfigError(AcqsimError):
    """Degenerate or contradictory configuration values."""
