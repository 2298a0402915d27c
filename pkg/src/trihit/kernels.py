"""Hot loops, each with a numba and a vectorised numpy implementation.

The public names dispatch on :data:`trihit._jit.HAVE_NUMBA`.  Both variants
are importable (``*_numpy`` always, ``*_numba`` when numba is on) so tests
can check that they agree.

Subset masks use a reversed bit order: vertex index ``i`` of ``n`` lives at
bit ``n - 1 - i``.  With that encoding the lexicographically smallest sorted
vertex tuple among equal-weight sets is the numerically largest mask.
"""
from __future__ import annotations

import numpy as np

from ._jit import HAVE_NUMBA, njit

CHUNK = 1 << 16


# ---------------------------------------------------------------- popcount

@njit
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


# ------------------------------------------------------ obstacle hitting

@njit
def _min_obstacle_hitting_nb(n, obstacles, weights):
    best_w = -1
    best_m = -1
    for m in range(1 << n):
        w = 0
        for i in range(n):
            if (m >> (n - 1 - i)) & 1:
                w += weights[i]
        if best_w >= 0 and w > best_w:
            continue
        ok = True
        for o in obstacles:
            if m & o == 0:
                ok = False
                break
        if not ok:
            continue
        if best_w < 0 or w < best_w or m > best_m:
            best_w = w
            best_m = m
    return best_m, best_w


def _subset_weights(masks, weights, n):
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (masks[:, None] >> shifts[None, :]) & 1
    return bits @ weights


def min_obstacle_hitting_numpy(n, obstacles, weights):
    best_w, best_m = -1, -1
    for start in range(0, 1 << n, CHUNK):
        masks = np.arange(start, min(start + CHUNK, 1 << n), dtype=np.int64)
        ok = np.ones(masks.shape[0], dtype=bool)
        for o in obstacles:
            ok &= (masks & o) != 0
        if not ok.any():
            continue
        cand = masks[ok]
        w = _subset_weights(cand, weights, n)
        lo = int(w.min())
        top = int(cand[w == lo].max())
        if best_w < 0 or lo < best_w or (lo == best_w and top > best_m):
            best_w, best_m = lo, top
    return best_m, best_w


# ------------------------------------------------------- peeling hitting
# mode 0: the rest must be a forest; mode 1: every component has at most
# one cycle.  Repeatedly strip vertices of degree <= 1; a forest peels away
# completely, a pseudoforest leaves disjoint cycles (all degrees exactly 2).

@njit
def _peel_ok_nb(n, adj, rest, mode):
    changed = True
    while changed:
        changed = False
        for i in range(n):
            b = np.int64(1) << (n - 1 - i)
            if rest & b and _popcount(adj[i] & rest) <= 1:
                rest &= ~b
                changed = True
    if mode == 0:
        return rest == 0
    for i in range(n):
        b = np.int64(1) << (n - 1 - i)
        if rest & b and _popcount(adj[i] & rest) != 2:
            return False
    return True


@njit
def _min_peeling_hitting_nb(n, adj, weights, mode):
    full = (np.int64(1) << n) - 1
    best_w = -1
    best_m = -1
    for m in range(1 << n):
        w = 0
        for i in range(n):
            if (m >> (n - 1 - i)) & 1:
                w += weights[i]
        if best_w >= 0 and w > best_w:
            continue
        if not _peel_ok_nb(n, adj, full & ~np.int64(m), mode):
            continue
        if best_w < 0 or w < best_w or m > best_m:
            best_w = w
            best_m = m
    return best_m, best_w


def _peel_ok_numpy(n, adj, rest, mode):
    bits = [np.int64(1) << (n - 1 - i) for i in range(n)]
    for _ in range(n):
        before = rest.copy()
        for i in range(n):
            strip = ((rest & bits[i]) != 0) & (np.bitwise_count(adj[i] & rest) <= 1)
            rest = np.where(strip, rest & ~bits[i], rest)
        if np.array_equal(before, rest):
            break
    if mode == 0:
        return rest == 0
    ok = np.ones(rest.shape[0], dtype=bool)
    for i in range(n):
        inside = (rest & bits[i]) != 0
        ok &= ~inside | (np.bitwise_count(adj[i] & rest) == 2)
    return ok


def min_peeling_hitting_numpy(n, adj, weights, mode):
    full = (1 << n) - 1
    best_w, best_m = -1, -1
    for start in range(0, 1 << n, CHUNK):
        masks = np.arange(start, min(start + CHUNK, 1 << n), dtype=np.int64)
        ok = _peel_ok_numpy(n, adj, full & ~masks, mode)
        if not ok.any():
            continue
        cand = masks[ok]
        w = _subset_weights(cand, weights, n)
        lo = int(w.min())
        top = int(cand[w == lo].max())
        if best_w < 0 or lo < best_w or (lo == best_w and top > best_m):
            best_w, best_m = lo, top
    return best_m, best_w


# ---------------------------------------------------------- box overlaps
# Closed axis-parallel boxes [x0, x1] x [y0, y1]; degenerate boxes are
# axis-parallel segments or points, so this covers 2-DIR scenes and squares.

@njit
def _box_overlap_pairs_nb(x0, y0, x1, y1, order):
    n = x0.shape[0]
    out_a = []
    out_b = []
    for oi in range(n):
        i = order[oi]
        for oj in range(oi + 1, n):
            j = order[oj]
            if x0[j] > x1[i]:
                break
            if y0[i] <= y1[j] and y0[j] <= y1[i]:
                out_a.append(min(i, j))
                out_b.append(max(i, j))
    res = np.empty((len(out_a), 2), dtype=np.int64)
    for t in range(len(out_a)):
        res[t, 0] = out_a[t]
        res[t, 1] = out_b[t]
    return res


def box_overlap_pairs_numpy(x0, y0, x1, y1, order=None):
    """Pairs (i, j), i < j, of meeting boxes in lexicographic order."""
    n = x0.shape[0]
    found = []
    rows = max(1, (1 << 22) // max(n, 1))
    for s in range(0, n, rows):
        i = np.arange(s, min(s + rows, n))
        hit = ((x0[i, None] <= x1[None, :]) & (x0[None, :] <= x1[i, None])
               & (y0[i, None] <= y1[None, :]) & (y0[None, :] <= y1[i, None]))
        hit &= np.arange(n)[None, :] > i[:, None]
        a, b = np.nonzero(hit)
        found.append(np.stack([i[a], b], axis=1))
    if not found:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(found).astype(np.int64)


def _as_i64(*arrays):
    return [np.ascontiguousarray(a, dtype=np.int64) for a in arrays]


if HAVE_NUMBA:
    def min_obstacle_hitting_numba(n, obstacles, weights):
        obs, w = _as_i64(obstacles, weights)
        m, bw = _min_obstacle_hitting_nb(n, obs, w)
        return int(m), int(bw)

    def min_peeling_hitting_numba(n, adj, weights, mode):
        a, w = _as_i64(adj, weights)
        m, bw = _min_peeling_hitting_nb(n, a, w, mode)
        return int(m), int(bw)

    def box_overlap_pairs_numba(x0, y0, x1, y1, order=None):
        x0, y0, x1, y1 = _as_i64(x0, y0, x1, y1)
        if order is None:
            order = np.argsort(x0, kind="stable")
        pairs = _box_overlap_pairs_nb(x0, y0, x1, y1, order.astype(np.int64))
        return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]

    min_obstacle_hitting = min_obstacle_hitting_numba
    min_peeling_hitting = min_peeling_hitting_numba
    box_overlap_pairs = box_overlap_pairs_numba
else:  # pragma: no cover - exercised through the env flag
    def min_obstacle_hitting(n, obstacles, weights):
        obs, w = _as_i64(obstacles, weights)
        return min_obstacle_hitting_numpy(n, obs, w)

    def min_peeling_hitting(n, adj, weights, mode):
        a, w = _as_i64(adj, weights)
        return min_peeling_hitting_numpy(n, a, w, mode)

    def box_overlap_pairs(x0, y0, x1, y1, order=None):
        return box_overlap_pairs_numpy(*_as_i64(x0, y0, x1, y1))
