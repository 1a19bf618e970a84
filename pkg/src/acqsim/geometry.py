"""Point sets, (percolated) random geometric graphs, and grid dissections.

Distances are compared on squares throughout; a pair at distance exactly r
counts as an edge.  Neighbor search uses a uniform grid bucket index so that
building a graph on 1e5 points takes seconds, not minutes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .rng import substream
from .validation import check_probability, check_radius, check_seed

__all__ = [
    "Point",
    "PointSet",
    "GeometricGraph",
    "Dissection",
    "sample_points",
    "build_rgg",
    "build_percolated_rgg",
    "percolate",
    "dissect",
    "dissect_by_m",
    "TOUCHING8",
    "CORNER_RULE",
]

TOUCHING8 = "touching8"
CORNER_RULE = "corner_rule"


@dataclass(frozen=True)
class Point:
    """A point of the unit square."""

    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ConfigError(f"point ({self.x}, {self.y}) outside the unit square")


@dataclass(frozen=True)
class PointSet:
    """n points of [0,1]^2, reproducible bit-for-bit from (n, seed)."""

    coords: np.ndarray  # (n, 2) float64
    seed: int
    n: int

    def __post_init__(self):
        if self.coords.shape != (self.n, 2):
            raise ConfigError(f"coords shape {self.coords.shape} != ({self.n}, 2)")

    def __len__(self) -> int:
        return self.n

    @property
    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in self.coords]


def sample_points(n: int, seed: int) -> PointSet:
    """Sample n i.i.d. uniform points on the unit square."""
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    seed = check_seed(seed)
    gen = substream(seed, "points")
    coords = gen.random((n, 2))
    coords.flags.writeable = False
    return PointSet(coords=coords, seed=seed, n=n)


_BLOCK_PAIR_LIMIT = 2_000_000


def _close_pair_keys(coords, n, ia, ib, r2, out, same):
    """Append lo*n+hi keys of all in-range pairs between two bucket slices,
    chunked so the intermediate distance matrices stay small."""
    rows = max(1, _BLOCK_PAIR_LIMIT // max(len(ib), 1))
    for s in range(0, len(ia), rows):
        sub = ia[s:s + rows]
        diff = coords[sub][:, None, :] - coords[ib][None, :, :]
        close = (diff[..., 0] ** 2 + diff[..., 1] ** 2) <= r2
        if same:
            # strict upper triangle of the global block
            close &= sub[:, None] < ib[None, :]
        ii, jj = np.nonzero(close)
        if len(ii):
            a = sub[ii]
            b = ib[jj]
            out.append(np.minimum(a, b) * n + np.maximum(a, b))


def _grid_pair_keys(coords: np.ndarray, r: float) -> np.ndarray:
    """Sorted lo*n+hi keys of all index pairs at distance <= r, via a uniform
    bucket grid of side >= r (so only the 8-neighborhood must be scanned)."""
    n = len(coords)
    if n < 2:
        return np.empty(0, dtype=np.int64)
    nb = max(1, int(1.0 / r))
    side = 1.0 / nb
    bx = np.minimum((coords[:, 0] / side).astype(np.int64), nb - 1)
    by = np.minimum((coords[:, 1] / side).astype(np.int64), nb - 1)
    bucket = bx * nb + by
    order = np.argsort(bucket, kind="stable").astype(np.int64)
    sorted_bucket = bucket[order]
    bounds = np.searchsorted(sorted_bucket, np.arange(nb * nb + 1))
    r2 = r * r
    out: list[np.ndarray] = []
    for b in range(nb * nb):
        ia = order[bounds[b]:bounds[b + 1]]
        if len(ia) == 0:
            continue
        cx, cy = divmod(b, nb)
        _close_pair_keys(coords, n, ia, ia, r2, out, same=True)
        for dx, dy in ((0, 1), (1, -1), (1, 0), (1, 1)):
            x2, y2 = cx + dx, cy + dy
            if not (0 <= x2 < nb and 0 <= y2 < nb):
                continue
            b2 = x2 * nb + y2
            ib = order[bounds[b2]:bounds[b2 + 1]]
            if len(ib):
                _close_pair_keys(coords, n, ia, ib, r2, out, same=False)
    if not out:
        return np.empty(0, dtype=np.int64)
    keys = np.concatenate(out)
    out.clear()
    keys.sort()
    return keys


def _decode_keys(keys: np.ndarray, n: int) -> np.ndarray:
    pairs = np.empty((len(keys), 2), dtype=np.int64)
    np.floor_divide(keys, n, out=pairs[:, 0])
    np.mod(keys, n, out=pairs[:, 1])
    return pairs


def _grid_pairs(coords: np.ndarray, r: float) -> np.ndarray:
    return _decode_keys(_grid_pair_keys(coords, r), len(coords))


def _keep_mask(n_edges: int, p: float, gen: np.random.Generator,
               chunk: int = 1 << 24) -> np.ndarray:
    """Coin flips in edge order, chunked so the float array never spikes."""
    keep = np.empty(n_edges, dtype=bool)
    for s in range(0, n_edges, chunk):
        e = min(s + chunk, n_edges)
        keep[s:e] = gen.random(e - s) < p
    return keep


def _csr_from_edges(n: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric CSR adjacency (indptr, indices) with sorted neighbor lists."""
    if len(edges) == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int32)
    keys = np.concatenate([edges[:, 0] * n + edges[:, 1],
                           edges[:, 1] * n + edges[:, 0]])
    keys.sort()
    src = keys // n
    dst = keys % n
    indptr = np.searchsorted(src, np.arange(n + 1)).astype(np.int64)
    return indptr, dst.astype(np.int32)


@dataclass
class GeometricGraph:
    """A (possibly percolated) geometric graph on a point set.

    ``edges`` is the canonical sorted (min, max) pair list; ``indptr`` /
    ``indices`` give symmetric per-vertex sorted neighbor lists.
    """

    points: PointSet
    radius: float
    edge_prob: float
    edges: np.ndarray            # (E, 2) int64, lexicographically sorted
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.points.n

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def neighbors_within(self, v: int, sorted_pool: np.ndarray) -> np.ndarray:
        """Neighbors of v restricted to a sorted vertex pool (vectorized)."""
        nbr = self.neighbors(v)
        loc = np.searchsorted(sorted_pool, nbr)
        ok = loc < len(sorted_pool)
        loc = loc[ok]
        nbr = nbr[ok]
        hit = sorted_pool[loc] == nbr
        return nbr[hit]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        k = np.searchsorted(row, v)
        return bool(k < len(row) and row[k] == v)

    def is_connected(self) -> bool:
        n = self.n
        if n <= 1:
            return True
        if self.edge_count == 0:
            return False
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            v = stack.pop()
            for w in self.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(int(w))
        return count == n

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "r": self.radius,
            "p": self.edge_prob,
            "seed": self.points.seed,
            "points": [[float(x), float(y)] for x, y in self.points.coords],
            "edges": [[int(u), int(v)] for u, v in self.edges],
        }
        return json.dumps(payload, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GeometricGraph":
        payload = json.loads(text)
        coords = np.asarray(payload["points"], dtype=np.float64).reshape(payload["n"], 2)
        coords.flags.writeable = False
        ps = PointSet(coords=coords, seed=int(payload["seed"]), n=int(payload["n"]))
        edges = np.asarray(payload["edges"], dtype=np.int64).reshape(-1, 2)
        indptr, indices = _csr_from_edges(ps.n, edges)
        return cls(points=ps, radius=float(payload["r"]), edge_prob=float(payload["p"]),
                   edges=edges, indptr=indptr, indices=indices)


def build_rgg(points: PointSet, r: float) -> GeometricGraph:
    """The exact unit-disk graph: edge iff distance <= r."""
    r = check_radius(r)
    edges = _grid_pairs(points.coords, r)
    indptr, indices = _csr_from_edges(points.n, edges)
    return GeometricGraph(points=points, radius=r, edge_prob=1.0,
                          edges=edges, indptr=indptr, indices=indices)


def percolate(g: GeometricGraph, p: float, seed: int) -> GeometricGraph:
    """Keep each edge independently with probability p.

    Coin flips are assigned to edges in lexicographic (min, max) endpoint
    order, so the retained edge set is a pure function of (graph, p, seed).
    """
    p = check_probability(p)
    seed = check_seed(seed)
    if g.edge_prob != 1.0:
        raise ConfigError("percolate expects an unpercolated graph")
    if p == 1.0:
        return GeometricGraph(points=g.points, radius=g.radius, edge_prob=1.0,
                              edges=g.edges, indptr=g.indptr, indices=g.indices)
    gen = substream(seed, "percolation")
    keep = _keep_mask(g.edge_count, p, gen)
    edges = g.edges[keep]
    indptr, indices = _csr_from_edges(g.n, edges)
    return GeometricGraph(points=g.points, radius=g.radius, edge_prob=p,
                          edges=edges, indptr=indptr, indices=indices)


def build_percolated_rgg(points: PointSet, r: float, p: float, seed: int) -> GeometricGraph:
    """build_rgg followed by percolate, fused so the unpercolated edge list
    (which can dwarf the retained one) never has to be materialized as pairs.
    Bit-identical to the two-step pipeline."""
    r = check_radius(r)
    p = check_probability(p)
    seed = check_seed(seed)
    keys = _grid_pair_keys(points.coords, r)
    if p < 1.0:
        gen = substream(seed, "percolation")
        keys = keys[_keep_mask(len(keys), p, gen)]
    edges = _decode_keys(keys, points.n)
    del keys
    indptr, indices = _csr_from_edges(points.n, edges)
    return GeometricGraph(points=points, radius=r, edge_prob=p,
                          edges=edges, indptr=indptr, indices=indices)


@dataclass
class Dissection:
    """An m-by-m grid of cells over the unit square.

    Cell (row, col) covers [col*s, (col+1)*s) x [row*s, (row+1)*s); points on
    the top/right boundary clamp into the last cell.  Cells are numbered
    row*m + col.
    """

    m: int
    side: float
    cell_of: np.ndarray          # (n,) int64 cell id per vertex
    members: list[np.ndarray]    # cell id -> sorted vertex ids
    adjacency_rule: str
    radius: float | None = None  # required by the corner rule

    @property
    def n_cells(self) -> int:
        return self.m * self.m

    def counts(self) -> np.ndarray:
        return np.array([len(mem) for mem in self.members], dtype=np.int64)

    def cell_rc(self, cell: int) -> tuple[int, int]:
        return divmod(cell, self.m)

    def cells_adjacent(self, a: int, b: int) -> bool:
        """Whether two distinct cells count as adjacent under the rule."""
        if a == b:
            return False
        ra, ca = divmod(a, self.m)
        rb, cb = divmod(b, self.m)
        if self.adjacency_rule == TOUCHING8:
            return max(abs(ra - rb), abs(ca - cb)) == 1
        if self.adjacency_rule == CORNER_RULE:
            if self.radius is None:
                raise ConfigError("corner rule needs the radius")
            lim = self.radius - self.side * math.sqrt(2.0)
            if lim < 0:
                return False
            dx = (ca - cb) * self.side
            dy = (ra - rb) * self.side
            return dx * dx + dy * dy <= lim * lim
        raise ConfigError(f"unknown adjacency rule {self.adjacency_rule!r}")

    def adjacent_cells(self, cell: int) -> list[int]:
        r0, c0 = divmod(cell, self.m)
        if self.adjacency_rule == TOUCHING8:
            reach = 1
        else:
            if self.radius is None:
                raise ConfigError("corner rule needs the radius")
            lim = self.radius - self.side * math.sqrt(2.0)
            if lim < 0:
                return []
            reach = int(lim / self.side)
        out = []
        for dr in range(-reach, reach + 1):
            for dc in range(-reach, reach + 1):
                if dr == 0 and dc == 0:
                    continue
                rr, cc = r0 + dr, c0 + dc
                if 0 <= rr < self.m and 0 <= cc < self.m:
                    other = rr * self.m + cc
                    if self.cells_adjacent(cell, other):
                        out.append(other)
        return out


def _assign_cells(coords: np.ndarray, m: int) -> np.ndarray:
    side = 1.0 / m
    col = np.minimum((coords[:, 0] / side).astype(np.int64), m - 1)
    row = np.minimum((coords[:, 1] / side).astype(np.int64), m - 1)
    return row * m + col


def dissect_by_m(points: PointSet, m: int, rule: str = TOUCHING8,
                 r: float | None = None) -> Dissection:
    """Dissection with an explicitly chosen grid resolution m."""
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    cell_of = _assign_cells(points.coords, m)
    members: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * (m * m)
    if points.n:
        order = np.argsort(cell_of, kind="stable")
        sorted_cells = cell_of[order]
        bounds = np.searchsorted(sorted_cells, np.arange(m * m + 1))
        members = [np.sort(order[bounds[c]:bounds[c + 1]]) for c in range(m * m)]
    return Dissection(m=m, side=1.0 / m, cell_of=cell_of, members=members,
                      adjacency_rule=rule, radius=r)


def dissect(points: PointSet, c_cell: float, r: float, rule: str = TOUCHING8) -> Dissection:
    """Dissection with m = ceil(c_cell / r) cells per side.

    With c_cell >= 2*sqrt(2) any two points in 8-touching cells lie within r
    of each other; c_cell >= sqrt(5) suffices for 4-touching cells.  The
    default c_cell = 3 covers both.
    """
    r = check_radius(r)
    if c_cell <= 0:
        raise ConfigError(f"c_cell must be positive, got {c_cell}")
    m = int(math.ceil(c_cell / r))
    return dissect_by_m(points, m, rule=rule, r=r)
