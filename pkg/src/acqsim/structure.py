"""Structural analysis of geometric graphs near the connectivity threshold.

Cells of a dissection are good when they hold at least T points; the cells
graph connects good cells that are provably mutually in range (corner rule)
or simply touching (desk-scale rule, where the corner rule degenerates
because cells are wider than r).  Points are safe / risky / dangerous by
whether some good cell of the main component / a minor component / nowhere
holds T of their neighbors.  Obstructions are dangerous clusters and the
extended minor components; a crucial vertex for an obstruction is a safe
vertex adjacent to all of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError, NoCrucial
from .geometry import CORNER_RULE, TOUCHING8, Dissection, GeometricGraph, dissect_by_m

__all__ = [
    "CellGraph",
    "PointClassification",
    "Obstruction",
    "StructureAnalysis",
    "StructureAnalyzer",
    "analyze",
    "verify_properties",
    "crucial_vertices",
    "check_occupancy",
    "check_blocks",
    "assign_and_partition",
]

SAFE, RISKY, DANGEROUS = 0, 1, 2
_LABEL_NAMES = {SAFE: "safe", RISKY: "risky", DANGEROUS: "dangerous"}


@dataclass
class CellGraph:
    """Good cells of a dissection plus their components, largest first."""

    dissection: Dissection
    threshold: float
    good_cells: np.ndarray                 # sorted cell ids
    components: list[np.ndarray]           # sorted by (-size, min cell id)

    @property
    def gamma_max(self) -> np.ndarray:
        return self.components[0] if self.components else np.empty(0, dtype=np.int64)

    def component_of(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, comp in enumerate(self.components):
            for c in comp:
                out[int(c)] = i
        return out


@dataclass
class PointClassification:
    labels: np.ndarray        # 0 safe / 1 risky / 2 dangerous
    witness_cell: np.ndarray  # qualifying cell id, or -1

    def names(self) -> list[str]:
        return [_LABEL_NAMES[int(x)] for x in self.labels]


@dataclass
class Obstruction:
    kind: str                 # "dangerous_cluster" or "gamma_plus"
    members: np.ndarray
    component: int = -1       # Gamma_i index for gamma_plus kinds
    crucial: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class StructureAnalysis:
    graph: GeometricGraph
    cell_graph: CellGraph
    classification: PointClassification
    obstructions: list[Obstruction]
    properties: dict
    threshold: float
    separation: float
    params: dict
    assignment: dict[int, int] = field(default_factory=dict)   # safe vertex -> cell
    a_sets: dict[int, np.ndarray] = field(default_factory=dict)
    a_partition: dict[int, list[np.ndarray]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "threshold": self.threshold,
            "separation": self.separation,
            "m": self.cell_graph.dissection.m,
            "good_cells": [int(c) for c in self.cell_graph.good_cells],
            "component_sizes": [len(c) for c in self.cell_graph.components],
            "labels": self.classification.names(),
            "obstructions": [
                {"kind": o.kind, "members": [int(v) for v in o.members],
                 "component": o.component, "crucial": [int(v) for v in o.crucial]}
                for o in self.obstructions
            ],
            "properties": {k: {"holds": bool(v[0]), "witness": v[1]}
                           for k, v in self.properties.items()},
        }


def _components(d: Dissection, good: np.ndarray) -> list[np.ndarray]:
    good_set = set(int(c) for c in good)
    seen: set[int] = set()
    comps: list[np.ndarray] = []
    for c in good:
        c = int(c)
        if c in seen:
            continue
        stack = [c]
        seen.add(c)
        comp = [c]
        while stack:
            x = stack.pop()
            for y in d.adjacent_cells(x):
                if y in good_set and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(np.array(sorted(comp), dtype=np.int64))
    comps.sort(key=lambda comp: (-len(comp), int(comp.min())))
    return comps


def _neighbor_cell_counts(g: GeometricGraph, d: Dissection, v: int) -> dict[int, int]:
    """Graph-neighbor counts of v per cell (v itself excluded)."""
    counts: dict[int, int] = {}
    for w in g.neighbors(v):
        c = int(d.cell_of[w])
        counts[c] = counts.get(c, 0) + 1
    return counts


class StructureAnalyzer(BaseEstimator):
    """fit(g) computes the full structural analysis into ``analysis_``.

    Parameters
    ----------
    eta : dissection scale; m = ceil(sqrt(n / (eta^2 ln n))).
    delta : good-cell threshold coefficient; T = delta * ln n.
    separation_factor : obstruction separation, in units of r.  The
        asymptotic value (1e10) is useless inside a unit square; 10 is the
        desk default.
    rule : cells-graph adjacency rule.  The corner rule is the provably-in-
        range one but requires cells much smaller than r (tiny eta); with the
        desk eta = 1 it yields no edges at all, so touching8 is the default.
    """

    def __init__(self, eta: float = 1.0, delta: float = 0.1,
                 separation_factor: float = 10.0, rule: str = TOUCHING8):
        self.eta = eta
        self.delta = delta
        self.separation_factor = separation_factor
        self.rule = rule

    def fit(self, g: GeometricGraph, y=None):
        self.analysis_ = analyze(g, eta=self.eta, delta=self.delta,
                                 separation_factor=self.separation_factor,
                                 rule=self.rule)
        return self


def analyze(g: GeometricGraph, eta: float = 1.0, delta: float = 0.1,
            separation_factor: float = 10.0, rule: str = TOUCHING8,
            m: int | None = None) -> StructureAnalysis:
    """Full structural analysis; deterministic in its inputs."""
    n = g.n
    r = g.radius
    if rule not in (TOUCHING8, CORNER_RULE):
        raise ConfigError(f"unknown cells-graph rule {rule!r}")
    logn = math.log(max(n, 2))
    if m is None:
        m = max(1, int(math.ceil(math.sqrt(max(n, 1) / (eta * eta * logn)))))
    d = dissect_by_m(g.points, m, rule=rule, r=r)
    T = delta * logn
    separation = separation_factor * r
    counts = d.counts()
    good = np.nonzero(counts >= T)[0].astype(np.int64)
    comps = _components(d, good)
    cg = CellGraph(dissection=d, threshold=T, good_cells=good, components=comps)
    comp_of = cg.component_of()

    labels = np.full(n, DANGEROUS, dtype=np.int8)
    witness = np.full(n, -1, dtype=np.int64)
    qualifying: list[dict[int, int]] = [dict() for _ in range(n)]
    for v in range(n):
        best_safe = -1
        best_risky = -1
        for c, cnt in sorted(_neighbor_cell_counts(g, d, v).items()):
            if cnt < T or c not in comp_of:
                continue
            comp = comp_of[c]
            qualifying[v][c] = comp
            if comp == 0 and best_safe < 0:
                best_safe = c
            elif comp > 0 and best_risky < 0:
                best_risky = c
        if best_safe >= 0:
            labels[v] = SAFE
            witness[v] = best_safe
        elif best_risky >= 0:
            labels[v] = RISKY
            witness[v] = best_risky
    classification = PointClassification(labels=labels, witness_cell=witness)

    obstructions: list[Obstruction] = []
    # extended minor components: their cells' points plus qualifying risky points
    for i in range(1, len(comps)):
        cells_i = set(int(c) for c in comps[i])
        members = set(v for v in range(n) if int(d.cell_of[v]) in cells_i)
        for v in range(n):
            if labels[v] == RISKY and i in qualifying[v].values():
                members.add(v)
        members = np.array(sorted(members), dtype=np.int64)
        if len(members):
            obstructions.append(Obstruction(kind="gamma_plus", members=members, component=i))

    dangerous = np.nonzero(labels == DANGEROUS)[0]
    if len(dangerous):
        coords = g.points.coords
        parent = {int(v): int(v) for v in dangerous}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        sep2 = separation * separation
        dv = coords[dangerous]
        for i in range(len(dangerous)):
            diff = dv[i + 1:] - dv[i]
            close = np.nonzero((diff ** 2).sum(axis=1) <= sep2)[0]
            for j in close:
                a, b = find(int(dangerous[i])), find(int(dangerous[i + 1 + j]))
                if a != b:
                    parent[a] = b
        clusters: dict[int, list[int]] = {}
        for v in dangerous:
            clusters.setdefault(find(int(v)), []).append(int(v))
        for root in sorted(clusters):
            members = np.array(sorted(clusters[root]), dtype=np.int64)
            obstructions.append(Obstruction(kind="dangerous_cluster", members=members))

    analysis = StructureAnalysis(
        graph=g, cell_graph=cg, classification=classification,
        obstructions=obstructions, properties={}, threshold=T,
        separation=separation,
        params={"eta": eta, "delta": delta, "separation_factor": separation_factor,
                "rule": rule, "m": m, "n": n, "r": r})
    for o in analysis.obstructions:
        o.crucial = crucial_vertices(analysis, o)
    analysis.properties = verify_properties(analysis)
    return analysis


def _diameter(coords: np.ndarray, members: np.ndarray) -> tuple[float, tuple[int, int]]:
    if len(members) < 2:
        return 0.0, (int(members[0]) if len(members) else -1,) * 2
    pts = coords[members]
    best = -1.0
    pair = (int(members[0]), int(members[0]))
    for i in range(len(members)):
        d2 = ((pts[i + 1:] - pts[i]) ** 2).sum(axis=1)
        if len(d2):
            j = int(np.argmax(d2))
            if d2[j] > best:
                best = float(d2[j])
                pair = (int(members[i]), int(members[i + 1 + j]))
    return math.sqrt(max(best, 0.0)), pair


def _set_distance(coords, a: np.ndarray, b: np.ndarray) -> tuple[float, tuple[int, int]]:
    best = math.inf
    pair = (-1, -1)
    pa = coords[a]
    for j, v in enumerate(b):
        d2 = ((pa - coords[v]) ** 2).sum(axis=1)
        i = int(np.argmin(d2))
        if d2[i] < best:
            best = float(d2[i])
            pair = (int(a[i]), int(v))
    return math.sqrt(best) if len(a) and len(b) else math.inf, pair


def verify_properties(a: StructureAnalysis) -> dict:
    """The five desired properties, each with a violating witness when false.

    Vacuously true clauses (no minor components, no dangerous points) hold.
    """
    g = a.graph
    coords = g.points.coords
    r = g.radius
    cg = a.cell_graph
    labels = a.classification.labels
    out: dict[str, tuple[bool, object]] = {}
    n_cells = cg.dissection.n_cells
    gamma_max_size = len(cg.gamma_max)
    out["P1"] = (gamma_max_size > 0.99 * n_cells,
                 {"gamma_max": gamma_max_size, "cells": n_cells})
    plus = [o for o in a.obstructions if o.kind == "gamma_plus"]
    p2 = (True, None)
    for o in plus:
        diam, pair = _diameter(coords, o.members)
        if diam >= r / 100.0:
            p2 = (False, {"component": o.component, "pair": pair, "diam": diam})
            break
    out["P2"] = p2
    dangerous = np.nonzero(labels == DANGEROUS)[0]
    p3 = (True, None)
    for i in range(len(dangerous)):
        for j in range(i + 1, len(dangerous)):
            dist = math.dist(coords[dangerous[i]], coords[dangerous[j]])
            if not (dist < r / 100.0 or dist > a.separation):
                p3 = (False, {"pair": (int(dangerous[i]), int(dangerous[j])), "dist": dist})
                break
        if not p3[0]:
            break
    out["P3"] = p3
    p4 = (True, None)
    for i in range(len(plus)):
        for j in range(i + 1, len(plus)):
            dist, pair = _set_distance(coords, plus[i].members, plus[j].members)
            if dist < a.separation:
                p4 = (False, {"components": (plus[i].component, plus[j].component),
                              "pair": pair, "dist": dist})
                break
        if not p4[0]:
            break
    out["P4"] = p4
    p5 = (True, None)
    for o in plus:
        for v in dangerous:
            dist, pair = _set_distance(coords, np.array([v]), o.members)
            if dist < a.separation:
                p5 = (False, {"component": o.component, "pair": pair, "dist": dist})
                break
        if not p5[0]:
            break
    out["P5"] = p5
    return out


def crucial_vertices(a: StructureAnalysis, o: Obstruction) -> np.ndarray:
    """Safe vertices adjacent to every member of the obstruction."""
    g = a.graph
    members = set(int(v) for v in o.members)
    first = int(o.members[np.argmin([g.degree(int(v)) for v in o.members])])
    candidates = set(int(w) for w in g.neighbors(first)) - members
    for v in o.members:
        if int(v) == first:
            continue
        candidates &= set(int(w) for w in g.neighbors(int(v)))
        if not candidates:
            break
    labels = a.classification.labels
    out = sorted(v for v in candidates if labels[v] == SAFE)
    return np.array(out, dtype=np.int64)


def check_occupancy(a: StructureAnalysis, C: float,
                    c1: float | None = None, c3: float | None = None) -> bool:
    """Occupancy sanity: max cell count <= C ln n, max obstruction size <=
    c1 ln n, and (when A-sets exist) max |A(c)| <= c3 ln n.  Unset
    coefficients default to C."""
    n = a.graph.n
    logn = math.log(max(n, 2))
    counts = a.cell_graph.dissection.counts()
    if len(counts) and counts.max() > C * logn:
        return False
    c1 = C if c1 is None else c1
    for o in a.obstructions:
        if o.size > c1 * logn:
            return False
    c3 = C if c3 is None else c3
    for members in a.a_sets.values():
        if len(members) > c3 * logn:
            return False
    return True


def check_blocks(g: GeometricGraph, K_block: int, eps: float, T: float,
                 eta: float = 1.0) -> dict:
    """Worst bad-cell area per K x K block against the three thresholds:
    interior (1+eps) ln n / n, boundary half that, corner blocks clean."""
    n = g.n
    logn = math.log(max(n, 2))
    m = max(1, int(math.ceil(math.sqrt(max(n, 1) / (eta * eta * logn)))))
    d = dissect_by_m(g.points, m, rule=TOUCHING8, r=g.radius)
    counts = d.counts()
    bad = counts < T
    area = d.side * d.side
    blocks = max(1, -(-m // K_block))
    worst_interior = 0.0
    worst_boundary = 0.0
    corner_clean = True
    for br in range(blocks):
        for bc in range(blocks):
            r0, c0 = br * K_block, bc * K_block
            total = 0
            for rr in range(r0, min(r0 + K_block, m)):
                for cc in range(c0, min(c0 + K_block, m)):
                    if bad[rr * m + cc]:
                        total += 1
            bad_area = total * area
            on_boundary = br == 0 or bc == 0 or r0 + K_block >= m or c0 + K_block >= m
            on_corner = (br in (0, blocks - 1)) and (bc in (0, blocks - 1))
            if on_corner and total:
                corner_clean = False
            if on_boundary:
                worst_boundary = max(worst_boundary, bad_area)
            else:
                worst_interior = max(worst_interior, bad_area)
    lim = (1.0 + eps) * logn / max(n, 1)
    return {
        "interior_ok": worst_interior <= lim,
        "boundary_ok": worst_boundary <= lim / 2.0,
        "corner_ok": corner_clean,
        "worst_interior": worst_interior,
        "worst_boundary": worst_boundary,
        "limit": lim,
    }


def assign_and_partition(a: StructureAnalysis, class_frac: float = 0.01) -> StructureAnalysis:
    """Assign stray safe points and obstructions to main-component cells and
    split each A(c) into classes of at most max-class-size = class_frac * T
    members (ConfigError when that cap falls below one vertex).
    """
    cap_raw = class_frac * a.threshold
    if cap_raw < 1.0:
        raise ConfigError(
            f"class size cap {cap_raw:.3f} < 1 (T = {a.threshold:.3f}, "
            f"class_frac = {class_frac}); raise delta or class_frac")
    cap = int(cap_raw)
    g = a.graph
    d = a.cell_graph.dissection
    gamma_max = set(int(c) for c in a.cell_graph.gamma_max)
    labels = a.classification.labels
    witness = a.classification.witness_cell
    assignment: dict[int, int] = {}
    for v in range(g.n):
        if labels[v] == SAFE and int(d.cell_of[v]) not in gamma_max:
            assignment[v] = int(witness[v])
    for o in a.obstructions:
        if len(o.crucial) == 0:
            raise NoCrucial(f"obstruction {o.kind} of size {o.size} has no crucial vertex")
        # a crucial vertex is safe, so its witness cell lies in the main component
        votes: dict[int, int] = {}
        for v in o.crucial:
            votes[int(witness[v])] = votes.get(int(witness[v]), 0) + 1
        best = min(votes, key=lambda c: (-votes[c], c))
        for v in o.members:
            assignment[int(v)] = best
    a_sets: dict[int, np.ndarray] = {}
    for c in a.cell_graph.gamma_max:
        c = int(c)
        home = {int(x) for x in d.members[c] if assignment.get(int(x), c) == c}
        extra = {v for v, cell in assignment.items() if cell == c}
        a_sets[c] = np.array(sorted(home | extra), dtype=np.int64)
    a_partition: dict[int, list[np.ndarray]] = {}
    for c, members in a_sets.items():
        parts = [members[i:i + cap] for i in range(0, len(members), cap)]
        a_partition[c] = parts
    a.assignment = assignment
    a.a_sets = a_sets
    a.a_partition = a_partition
    return a
