"""Numba kernels behind the schedule verifier.

Everything operates on a shared row-bitset ``rows`` of shape (n, ceil(n/64))
uint64: bit b of row a means agents a and b are certified acquainted.  The
relation is kept symmetric; coverage counts the strict upper triangle.
"""

from __future__ import annotations

import numpy as np
from numba import njit

ONE = np.uint64(1)
SIX3 = np.uint64(63)


@njit(cache=True)
def mark_pairs(rows, a_arr, b_arr):
    """Symmetric marks for the given agent pairs."""
    for i in range(len(a_arr)):
        a = a_arr[i]
        b = b_arr[i]
        if a == b:
            continue
        rows[a, b >> 6] |= ONE << np.uint64(b & 63)
        rows[b, a >> 6] |= ONE << np.uint64(a & 63)


@njit(cache=True)
def set_mask_bits(mask, members):
    for i in range(len(members)):
        v = members[i]
        mask[v >> 6] |= ONE << np.uint64(v & 63)


@njit(cache=True)
def or_mask_into_rows(rows, members, mask):
    for i in range(len(members)):
        a = members[i]
        row = rows[a]
        for w in range(len(mask)):
            row[w] |= mask[w]


@njit(cache=True)
def or_masks(dst, src):
    for w in range(len(dst)):
        dst[w] |= src[w]


@njit(cache=True)
def andnot_masks(dst, src):
    for w in range(len(dst)):
        dst[w] &= ~src[w]


@njit(cache=True)
def coverage_count(rows, n):
    """Number of pairs a < b whose bit is set in row a."""
    total = 0
    for a in range(n):
        row = rows[a]
        w0 = (a + 1) >> 6
        # partial word containing bits (a+1) .. end of word
        first_bit = (a + 1) & 63
        if w0 < row.shape[0]:
            x = row[w0] >> np.uint64(first_bit)
            while x:
                x &= x - ONE
                total += 1
            for w in range(w0 + 1, row.shape[0]):
                x = row[w]
                while x:
                    x &= x - ONE
                    total += 1
    return total


@njit(cache=True)
def residual_scan(rows, n, cap):
    """Up to cap uncovered pairs (a < b), plus the total uncovered count."""
    out = np.empty((cap, 2), np.int64)
    k = 0
    total = 0
    for a in range(n):
        row = rows[a]
        for b in range(a + 1, n):
            if not (row[b >> 6] >> np.uint64(b & 63)) & ONE:
                total += 1
                if k < cap:
                    out[k, 0] = a
                    out[k, 1] = b
                    k += 1
    return out[:k], total


@njit(cache=True)
def token_walk(P, n_rounds, complete, parity0):
    """Simulate the brick-wall walk of P tokens over n_rounds.

    Round tau matches the position pairs (i, i+1) with i of parity
    (tau + parity0) mod 2.  ``complete[e]`` flags path edge e = (e, e+1) as
    having a complete local phase (all ones when phases are not in play).
    Returns:
      met      (P,P) u8: tokens directly swapped at least once
      met_ok   (P,P) u8: swapped on a complete edge
      tokpos   (P,P) u8: [i, p] token i visited position p
      tokpos_ok(P,P) u8: visited p via a swap on a complete edge touching p
      final    (P,)  i8: final position of each token
      any_ok   (P,)  u8: token ever swapped on a complete edge
    """
    met = np.zeros((P, P), np.uint8)
    met_ok = np.zeros((P, P), np.uint8)
    tokpos = np.zeros((P, P), np.uint8)
    tokpos_ok = np.zeros((P, P), np.uint8)
    any_ok = np.zeros(P, np.uint8)
    at = np.arange(P)      # position -> token
    pos = np.arange(P)     # token -> position
    for i in range(P):
        tokpos[i, i] = 1
    for tau in range(n_rounds):
        start = (tau + parity0) & 1
        for e in range(start, P - 1, 2):
            ta = at[e]
            tb = at[e + 1]
            met[ta, tb] = 1
            met[tb, ta] = 1
            ok = complete[e]
            if ok:
                met_ok[ta, tb] = 1
                met_ok[tb, ta] = 1
                any_ok[ta] = 1
                any_ok[tb] = 1
                tokpos_ok[ta, e] = 1
                tokpos_ok[ta, e + 1] = 1
                tokpos_ok[tb, e] = 1
                tokpos_ok[tb, e + 1] = 1
            at[e] = tb
            at[e + 1] = ta
            pos[ta] = e + 1
            pos[tb] = e
            tokpos[ta, e + 1] = 1
            tokpos[tb, e] = 1
    return met, met_ok, tokpos, tokpos_ok, pos, any_ok


@njit(cache=True)
def occupant_walk(occ, ia_flat, ib_flat, edge_ptr, P, n_rounds, parity0):
    """Evolve the (P, t) slot-occupant table through the brick-wall rounds.

    ia_flat/ib_flat give, per path edge (CSR-style via edge_ptr), the matched
    slot indices on the two sides.  Returns the final occupant table.
    """
    for tau in range(n_rounds):
        start = (tau + parity0) & 1
        for e in range(start, P - 1, 2):
            for k in range(edge_ptr[e], edge_ptr[e + 1]):
                sa = ia_flat[k]
                sb = ib_flat[k]
                tmp = occ[e, sa]
                occ[e, sa] = occ[e + 1, sb]
                occ[e + 1, sb] = tmp
    return occ


@njit(cache=True)
def local_meet_sim(nU, indptr, indices, rounds_flat, round_ptr, record):
    """Exact acquaintance run on one induced subgraph, in local indices.

    Initial relation = local adjacency.  Returns (meet_rows, positions) where
    meet_rows is an (nU, ceil(nU/64)) agent-indexed bitset and positions is
    the (rounds+1, nU) vertex-of-agent trace when ``record``, else a (1, nU)
    dummy.  Local agents are named by their starting vertex index.
    """
    words = (nU + 63) // 64
    meet = np.zeros((nU, words), np.uint64)
    agent_of = np.arange(nU)
    vertex_of = np.arange(nU)
    n_rounds = len(round_ptr) - 1
    trace = np.empty((n_rounds + 1 if record else 1, nU), np.int32)
    if record:
        for a in range(nU):
            trace[0, a] = a
    for a in range(nU):
        for k in range(indptr[a], indptr[a + 1]):
            b = indices[k]
            meet[a, b >> 6] |= ONE << np.uint64(b & 63)
    for t in range(n_rounds):
        for k in range(round_ptr[t], round_ptr[t + 1]):
            u = rounds_flat[k, 0]
            v = rounds_flat[k, 1]
            au = agent_of[u]
            av = agent_of[v]
            agent_of[u] = av
            agent_of[v] = au
            vertex_of[av] = u
            vertex_of[au] = v
        for k in range(round_ptr[t], round_ptr[t + 1]):
            for side in range(2):
                w = rounds_flat[k, side]
                a = agent_of[w]
                for kk in range(indptr[w], indptr[w + 1]):
                    b = agent_of[indices[kk]]
                    meet[a, b >> 6] |= ONE << np.uint64(b & 63)
                    meet[b, a >> 6] |= ONE << np.uint64(a & 63)
        if record:
            for a in range(nU):
                trace[t + 1, a] = vertex_of[a]
    return meet, trace


@njit(cache=True)
def meet_complete(meet, nU):
    for a in range(nU):
        row = meet[a]
        for b in range(nU):
            if b == a:
                continue
            if not (row[b >> 6] >> np.uint64(b & 63)) & ONE:
                return False
    return True


@njit(cache=True)
def apply_swaps_positions(vertex_of, agent_of, pairs):
    for i in range(len(pairs)):
        u = pairs[i, 0]
        v = pairs[i, 1]
        au = agent_of[u]
        av = agent_of[v]
        agent_of[u] = av
        agent_of[v] = au
        vertex_of[av] = u
        vertex_of[au] = v


@njit(cache=True)
def check_residual_round(vertex_of, pairs_a, pairs_b, alive, indptr, indices):
    """Clear alive[i] when the residual pair (a_i, b_i) sits on an edge."""
    for i in range(len(pairs_a)):
        if not alive[i]:
            continue
        u = vertex_of[pairs_a[i]]
        v = vertex_of[pairs_b[i]]
        lo = indptr[u]
        hi = indptr[u + 1]
        # binary search v in the sorted neighbor row of u
        while lo < hi:
            mid = (lo + hi) >> 1
            w = indices[mid]
            if w < v:
                lo = mid + 1
            elif w > v:
                hi = mid
            else:
                alive[i] = 0
                break


@njit(cache=True)
def edges_ok(pairs, indptr, indices):
    """Index of the first pair that is not an edge, or -1."""
    for i in range(len(pairs)):
        u = pairs[i, 0]
        v = pairs[i, 1]
        lo = indptr[u]
        hi = indptr[u + 1]
        found = False
        while lo < hi:
            mid = (lo + hi) >> 1
            w = indices[mid]
            if w < v:
                lo = mid + 1
            elif w > v:
                hi = mid
            else:
                found = True
                break
        if not found:
            return i
    return -1


@njit(cache=True)
def max_pair_dist2(coords, ids_a, ids_b, same):
    """Max squared distance over ids_a x ids_b (strict upper pairs if same)."""
    best = 0.0
    for i in range(len(ids_a)):
        xa = coords[ids_a[i], 0]
        ya = coords[ids_a[i], 1]
        j0 = i + 1 if same else 0
        for j in range(j0, len(ids_b)):
            dx = xa - coords[ids_b[j], 0]
            dy = ya - coords[ids_b[j], 1]
            d = dx * dx + dy * dy
            if d > best:
                best = d
    return best
