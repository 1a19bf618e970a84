"""Schedule verification engines.

Two engines, one semantics: did every agent pair, at some round boundary,
occupy adjacent vertices?

exact       Round-by-round replay with a dense boolean relation.  Exact
            first_complete_round, exact witnesses.  Cost grows with
            (swap entries) x (average degree), so it is guarded.

structured  For schedules made of TourSegments.  Re-derives every claim the
            segment tables make directly from the schedule and the graph:
            transfer matchings really are perfect slot-to-slot matchings of
            graph edges; cell universes really are mutually in range when
            geometry is the certificate (p = 1); local phase plans really
            acquaint their whole universe (replayed once per plan, memoized).
            A token-level simulation of the brick-wall walk then certifies
            acquaintances in bulk into a row bitset.  Certificates only
            under-approximate, so any pair left uncovered is adjudicated by
            an exact targeted replay; the final verdict is exact.  The bulk
            granularity loses first_complete_round (reported as None).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels as K
from .errors import ConfigError, InvalidMatching
from .geometry import GeometricGraph
from .process import SimulationResult
from .schedule import LocalPlan, Schedule, TourSegment

__all__ = ["verify_schedule"]

_EXACT_COST_GUARD = 6e9


def verify_schedule(g: GeometricGraph, s: Schedule, engine: str = "auto",
                    witness_cap: int = 1000) -> SimulationResult:
    tours = sum(isinstance(seg, TourSegment) for seg in s.segments)
    if engine == "auto":
        pure_tours = tours == len(s.segments) and tours > 0
        engine = "structured" if (pure_tours and g.n > 1024) else "exact"
    if engine == "exact":
        return _exact_engine(g, s, witness_cap)
    if engine == "structured":
        if tours != len(s.segments):
            raise ConfigError("structured engine requires a pure TourSegment schedule")
        return _structured_engine(g, s, witness_cap)
    raise ConfigError(f"unknown engine {engine!r}")


# ---------------------------------------------------------------- exact ----


def _csr_gather(indptr, indices, verts):
    """Concatenated neighbor rows for the given vertices, with repeat index."""
    starts = indptr[verts]
    lens = (indptr[verts + 1] - starts).astype(np.int64)
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    rep = np.repeat(np.arange(len(verts)), lens)
    offs = np.arange(total) - np.repeat(np.cumsum(lens) - lens, lens)
    flat = indices[np.repeat(starts, lens) + offs].astype(np.int64)
    return rep, flat


def _validate_round(g: GeometricGraph, m: np.ndarray, round_index: int):
    flat = m.reshape(-1)
    if flat.min() < 0 or flat.max() >= g.n:
        raise InvalidMatching("vertex id out of range", round_index)
    if len(np.unique(flat)) != len(flat):
        raise InvalidMatching("a vertex appears twice", round_index)
    lo = np.minimum(m[:, 0], m[:, 1])
    hi = np.maximum(m[:, 0], m[:, 1])
    bad = K.edges_ok(np.stack([lo, hi], axis=1), g.indptr, g.indices)
    if bad >= 0:
        raise InvalidMatching(f"({lo[bad]}, {hi[bad]}) is not an edge", round_index)


def _exact_engine(g: GeometricGraph, s: Schedule, witness_cap: int) -> SimulationResult:
    n = g.n
    total_pairs = comb(n, 2)
    deg_avg = 2.0 * g.edge_count / max(n, 1)
    est = s.swap_entries() * max(deg_avg, 1.0) * 2.0
    if est > _EXACT_COST_GUARD:
        raise ConfigError(
            f"exact engine would need ~{est:.1e} operations here; "
            "use the structured engine for large tour schedules")
    acq = np.zeros((n, n), dtype=bool)
    if g.edge_count:
        acq[g.edges[:, 0], g.edges[:, 1]] = True
        acq[g.edges[:, 1], g.edges[:, 0]] = True
    covered = int(g.edge_count)
    agent_of = np.arange(n, dtype=np.int64)
    vertex_of = np.arange(n, dtype=np.int64)
    first_complete = 0 if covered == total_pairs else None
    total_rounds = 0
    for m in s.iter_matchings():
        round_index = total_rounds
        total_rounds += 1
        m = np.asarray(m, dtype=np.int64).reshape(-1, 2)
        if len(m) == 0:
            continue
        _validate_round(g, m, round_index)
        u, v = m[:, 0], m[:, 1]
        au, av = agent_of[u].copy(), agent_of[v].copy()
        agent_of[u], agent_of[v] = av, au
        vertex_of[av], vertex_of[au] = u, v
        if first_complete is not None:
            continue  # relation already complete; only validity still matters
        moved = m.reshape(-1)
        rep, nbrs = _csr_gather(g.indptr, g.indices, moved)
        owners = agent_of[moved][rep]
        others = agent_of[nbrs]
        keys = np.minimum(owners, others) * n + np.maximum(owners, others)
        uniq = np.unique(keys)
        ua, ub = uniq // n, uniq % n
        covered += int(np.count_nonzero(~acq[ua, ub]))
        acq[owners, others] = True
        acq[others, owners] = True
        if covered == total_pairs:
            first_complete = total_rounds
    all_acq = covered == total_pairs
    witnesses: list[tuple[int, int]] = []
    truncated = False
    if not all_acq:
        iu, ju = np.nonzero(np.triu(~acq, k=1))
        truncated = len(iu) > witness_cap
        witnesses = [(int(x), int(y)) for x, y in zip(iu[:witness_cap], ju[:witness_cap])]
    return SimulationResult(total_rounds=total_rounds, all_acquainted=all_acq,
                            first_complete_round=first_complete,
                            unacquainted_pairs=witnesses, residual_truncated=truncated)


# ----------------------------------------------------------- structured ----


@dataclass
class _PlanCheck:
    complete: bool
    universe: np.ndarray   # sorted vertex ids
    meet: np.ndarray       # (|U|, words) local meet bitset


def _induced_csr(g: GeometricGraph, universe: np.ndarray):
    """CSR of the induced subgraph, in local (sorted-universe) indices."""
    nu = len(universe)
    rows = []
    indptr = np.zeros(nu + 1, dtype=np.int64)
    for i, v in enumerate(universe):
        nbr = g.neighbors(int(v))
        loc = np.searchsorted(universe, nbr)
        ok = loc < nu
        loc_ok = loc[ok]
        hit = universe[loc_ok] == nbr[ok]
        rows.append(loc_ok[hit].astype(np.int32))
        indptr[i + 1] = indptr[i] + len(rows[-1])
    indices = np.concatenate(rows) if rows else np.empty(0, np.int32)
    return indptr, indices


def _validate_plan(g: GeometricGraph, plan: LocalPlan, round_hint: int):
    uni = plan.universe
    if len(np.unique(uni)) != len(uni):
        raise InvalidMatching("phase universe contains duplicates", round_hint)
    if not np.isin(plan.path, uni).all():
        raise InvalidMatching("phase path leaves its universe", round_hint)
    if plan.team < 1 or len(plan.path) % plan.team:
        raise ConfigError("phase path length is not a multiple of the team size")
    if len(plan.path) > 1:
        pairs = np.stack([np.minimum(plan.path[:-1], plan.path[1:]),
                          np.maximum(plan.path[:-1], plan.path[1:])], axis=1)
        bad = K.edges_ok(pairs.astype(np.int64), g.indptr, g.indices)
        if bad >= 0:
            raise InvalidMatching(
                f"phase path step ({pairs[bad, 0]}, {pairs[bad, 1]}) is not an edge",
                round_hint)
    if len(plan.swap_in):
        m = plan.swap_in
        if len(np.unique(m.reshape(-1))) != m.size:
            raise InvalidMatching("phase swap-in reuses a vertex", round_hint)
        pairs = np.stack([np.minimum(m[:, 0], m[:, 1]),
                          np.maximum(m[:, 0], m[:, 1])], axis=1)
        bad = K.edges_ok(pairs.astype(np.int64), g.indptr, g.indices)
        if bad >= 0:
            raise InvalidMatching("phase swap-in uses a non-edge", round_hint)


def _check_plan(g: GeometricGraph, plan: LocalPlan, cache: dict,
                round_hint: int, record: bool = False):
    key = id(plan)
    if key in cache and not record:
        return cache[key]
    _validate_plan(g, plan, round_hint)
    uni = np.sort(np.asarray(plan.universe, dtype=np.int64))
    indptr, indices = _induced_csr(g, uni)
    rounds = plan.rounds()
    seq = rounds + rounds[::-1]  # the phase block is the plan plus its mirror
    sizes = np.array([len(m) for m in seq], dtype=np.int64)
    round_ptr = np.zeros(len(seq) + 1, dtype=np.int64)
    np.cumsum(sizes, out=round_ptr[1:])
    if sizes.sum():
        flat = np.concatenate([m for m in seq if len(m)])
        loc = np.searchsorted(uni, flat.reshape(-1))
        ok = loc < len(uni)
        if not ok.all() or not np.array_equal(uni[loc], flat.reshape(-1)):
            raise InvalidMatching("phase matching leaves its universe", round_hint)
        flat_loc = loc.reshape(-1, 2).astype(np.int64)
    else:
        flat_loc = np.empty((0, 2), dtype=np.int64)
    meet, trace = K.local_meet_sim(len(uni), indptr, indices, flat_loc, round_ptr, record)
    check = _PlanCheck(complete=bool(K.meet_complete(meet, len(uni))),
                       universe=uni, meet=meet)
    if record:
        return check, trace
    cache[key] = check
    return check


def _slot_index_tables(slots_a, slots_b, transfer, g, round_hint):
    """Validate a transfer matching and convert it to slot-index pairs."""
    t = len(slots_a)
    if len(transfer) != t:
        raise InvalidMatching("transfer is not a perfect matching of the slots", round_hint)
    sa, sb = np.sort(slots_a), np.sort(slots_b)
    ia_order = np.argsort(slots_a, kind="stable")
    ib_order = np.argsort(slots_b, kind="stable")
    pa = np.clip(np.searchsorted(sa, transfer[:, 0]), 0, t - 1)
    pb = np.clip(np.searchsorted(sb, transfer[:, 1]), 0, t - 1)
    if not np.array_equal(sa[pa], transfer[:, 0]) or not np.array_equal(sb[pb], transfer[:, 1]):
        raise InvalidMatching("transfer endpoints are not the declared slots", round_hint)
    if len(np.unique(pa)) != t or len(np.unique(pb)) != t:
        raise InvalidMatching("transfer repeats a slot", round_hint)
    pairs = np.stack([np.minimum(transfer[:, 0], transfer[:, 1]),
                      np.maximum(transfer[:, 0], transfer[:, 1])], axis=1)
    bad = K.edges_ok(pairs.astype(np.int64), g.indptr, g.indices)
    if bad >= 0:
        raise InvalidMatching(
            f"transfer pair ({pairs[bad, 0]}, {pairs[bad, 1]}) is not an edge", round_hint)
    return ia_order[pa].astype(np.int64), ib_order[pb].astype(np.int64)


def _geometry_sound(g: GeometricGraph, seg: TourSegment):
    """For p = 1 tours: colocation in a cell, or in consecutive cells, must
    imply adjacency.  Verified against the coordinates, not trusted."""
    r2 = g.radius * g.radius
    coords = g.points.coords
    for i, uni in enumerate(seg.universe):
        if len(uni) > 1 and K.max_pair_dist2(coords, uni, uni, True) > r2:
            raise ConfigError(f"cell universe {i} is not pairwise within range")
    for i in range(len(seg.universe) - 1):
        a, b = seg.universe[i], seg.universe[i + 1]
        if len(a) and len(b) and K.max_pair_dist2(coords, a, b, False) > r2:
            raise ConfigError(f"consecutive cells {i}, {i + 1} are not mutually in range")


def _process_tour(g: GeometricGraph, seg: TourSegment, rows, agent_of, vertex_of,
                  plan_cache: dict, round_offset: int):
    words = rows.shape[1]
    P = seg.n_positions
    slots = seg.slots
    if P < 1 or slots.shape[1] < 1:
        raise ConfigError("degenerate tour segment")
    all_u = np.concatenate(seg.universe)
    if len(np.unique(all_u)) != len(all_u):
        raise ConfigError("tour universes overlap")
    for i in range(P):
        if not np.isin(slots[i], seg.universe[i]).all():
            raise ConfigError(f"slots of position {i} leave their universe")

    phases = seg.phase_plans is not None
    complete = np.ones(max(P - 1, 1), dtype=np.uint8)
    if phases:
        for e in range(P - 1):
            plan = seg.phase_plans[e]
            if plan is None:
                complete[e] = 0
            else:
                complete[e] = 1 if _check_plan(g, plan, plan_cache, round_offset).complete else 0
    elif g.edge_prob == 1.0:
        _geometry_sound(g, seg)
    else:
        raise ConfigError("percolated tours need phase plans to certify acquaintance")

    ia_parts, ib_parts = [], []
    edge_ptr = np.zeros(P, dtype=np.int64)
    for e in range(P - 1):
        ia, ib = _slot_index_tables(slots[e], slots[e + 1], seg.transfers[e], g, round_offset)
        ia_parts.append(ia)
        ib_parts.append(ib)
        edge_ptr[e + 1] = edge_ptr[e] + len(ia)
    ia_flat = np.concatenate(ia_parts) if ia_parts else np.empty(0, np.int64)
    ib_flat = np.concatenate(ib_parts) if ib_parts else np.empty(0, np.int64)

    group_members = [agent_of[slots[i]].copy() for i in range(P)]
    resident_members = []
    for i in range(P):
        rest = np.setdiff1d(seg.universe[i], slots[i])
        resident_members.append(agent_of[rest].copy() if len(rest) else
                                np.empty(0, dtype=np.int64))

    parity0 = 1 if seg.reverse else 0
    met, met_ok, tokpos, tokpos_ok, final_pos, any_ok = K.token_walk(
        P, seg.n_grid_rounds, complete, parity0)
    met_use = met_ok if phases else met
    visit_use = tokpos_ok if phases else tokpos

    gmask = np.zeros((P, words), dtype=np.uint64)
    rmask = np.zeros((P, words), dtype=np.uint64)
    for i in range(P):
        K.set_mask_bits(gmask[i], group_members[i])
        K.set_mask_bits(rmask[i], resident_members[i])
    all_groups = np.zeros(words, dtype=np.uint64)
    all_res = np.zeros(words, dtype=np.uint64)
    for i in range(P):
        K.or_masks(all_groups, gmask[i])
        K.or_masks(all_res, rmask[i])

    scratch = np.zeros(words, dtype=np.uint64)
    for i in range(P):
        scratch[:] = 0
        row_m = met_use[i]
        if int(row_m.sum()) - int(row_m[i]) == P - 1:
            K.or_masks(scratch, all_groups)
        else:
            for j in range(P):
                if row_m[j] and j != i:
                    K.or_masks(scratch, gmask[j])
        row_v = visit_use[i]
        if row_v.all():
            K.or_masks(scratch, all_res)
        else:
            for p in range(P):
                if row_v[p]:
                    K.or_masks(scratch, rmask[p])
        if (not phases) or any_ok[i]:
            K.or_masks(scratch, gmask[i])
        K.or_mask_into_rows(rows, group_members[i], scratch)

    for p in range(P):
        if not len(resident_members[p]):
            continue
        scratch[:] = 0
        col = visit_use[:, p]
        if col.all():
            K.or_masks(scratch, all_groups)
        else:
            for i in range(P):
                if col[i]:
                    K.or_masks(scratch, gmask[i])
        if phases:
            left_ok = p > 0 and bool(complete[p - 1])
            right_ok = p < P - 1 and bool(complete[p])
            if left_ok or right_ok:
                K.or_masks(scratch, rmask[p])
            if left_ok:
                K.or_masks(scratch, rmask[p - 1])
            if right_ok:
                K.or_masks(scratch, rmask[p + 1])
        else:
            K.or_masks(scratch, rmask[p])
            if p > 0:
                K.or_masks(scratch, rmask[p - 1])
            if p < P - 1:
                K.or_masks(scratch, rmask[p + 1])
        K.or_mask_into_rows(rows, resident_members[p], scratch)

    # net effect: groups land on the slots of their final position, ordered
    # exactly as the transfer bijections dictate
    occ = np.stack(group_members).astype(np.int64)
    occ = K.occupant_walk(occ, ia_flat, ib_flat, edge_ptr, P, seg.n_grid_rounds, parity0)
    for pos in range(P):
        agent_of[slots[pos]] = occ[pos]
        vertex_of[occ[pos]] = slots[pos]


def _structured_engine(g: GeometricGraph, s: Schedule, witness_cap: int) -> SimulationResult:
    n = g.n
    words = (n + 63) // 64
    rows = np.zeros((n, words), dtype=np.uint64)
    if g.edge_count:
        K.mark_pairs(rows, g.edges[:, 0].astype(np.int64), g.edges[:, 1].astype(np.int64))
    agent_of = np.arange(n, dtype=np.int64)
    vertex_of = np.arange(n, dtype=np.int64)
    plan_cache: dict = {}
    round_offset = 0
    for seg in s.segments:
        _process_tour(g, seg, rows, agent_of, vertex_of, plan_cache, round_offset)
        round_offset += seg.n_rounds
    total_pairs = comb(n, 2)
    covered = K.coverage_count(rows, n)
    total_rounds = s.n_rounds
    if covered == total_pairs:
        return SimulationResult(total_rounds=total_rounds, all_acquainted=True,
                                first_complete_round=None)
    cap = max(witness_cap, 1)
    residual, missing_total = K.residual_scan(rows, n, cap)
    alive = _adjudicate_residual(g, s, residual)
    confirmed = [(int(a), int(b)) for (a, b), live in zip(residual, alive) if live]
    truncated = missing_total > len(residual)
    if not confirmed:
        if truncated:
            raise ConfigError(
                f"{missing_total} pairs lack certificates but the first {cap} all "
                "verify as acquainted; rerun with a larger witness_cap")
        # certificates under-approximated; the exact replay cleared everything
        return SimulationResult(total_rounds=total_rounds, all_acquainted=True,
                                first_complete_round=None)
    return SimulationResult(total_rounds=total_rounds, all_acquainted=False,
                            first_complete_round=None,
                            unacquainted_pairs=confirmed,
                            residual_truncated=truncated)


def _adjudicate_residual(g: GeometricGraph, s: Schedule, residual: np.ndarray) -> np.ndarray:
    """Exact replay deciding each residual pair; 1 = never acquainted."""
    k = len(residual)
    alive = np.ones(k, dtype=np.uint8)
    if k == 0:
        return alive
    a = residual[:, 0].astype(np.int64).copy()
    b = residual[:, 1].astype(np.int64).copy()
    agent_of = np.arange(g.n, dtype=np.int64)
    vertex_of = np.arange(g.n, dtype=np.int64)
    K.check_residual_round(vertex_of, a, b, alive, g.indptr, g.indices)
    for m in s.iter_matchings():
        if len(m):
            K.apply_swaps_positions(vertex_of, agent_of, np.asarray(m, dtype=np.int64))
        K.check_residual_round(vertex_of, a, b, alive, g.indptr, g.indices)
        if not alive.any():
            break
    return alive
