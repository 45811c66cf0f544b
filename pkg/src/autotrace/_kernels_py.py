"""Pure-Python/numpy implementation of the repeat-mining kernels.

Mirrors ``_kernels.pyx`` function for function; used when the compiled
extension is unavailable or ``AUTOTRACE_PURE=1`` is set.  Input strings
are int64 arrays of dense symbols (0..sigma-1).
"""

from __future__ import annotations

import numpy as np

_I64 = np.int64


def suffix_array(s: np.ndarray) -> np.ndarray:
    # prefix doubling over (rank[i], rank[i+k]) pairs
    n = len(s)
    if n == 0:
        return np.empty(0, dtype=_I64)
    rank = np.asarray(s, dtype=_I64).copy()
    sa = np.argsort(rank, kind="stable").astype(_I64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=_I64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank)).astype(_I64)
        r, sec = rank[sa], second[sa]
        diff = (r[1:] != r[:-1]) | (sec[1:] != sec[:-1])
        new = np.empty(n, dtype=_I64)
        new[sa] = np.concatenate(([0], np.cumsum(diff)))
        rank = new
        if rank[sa[-1]] == n - 1:
            return sa
        k *= 2


def lcp_array(s: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai et al.: lcp[i] = LCP(suffix sa[i], suffix sa[i+1])."""
    n = len(sa)
    if n < 2:
        return np.empty(0, dtype=_I64)
    seq = s.tolist()
    sal = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sal):
        rank[p] = i
    lcp = [0] * (n - 1)
    h = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sal[r + 1]
        while i + h < n and j + h < n and seq[i + h] == seq[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return np.asarray(lcp, dtype=_I64)


def candidates(sa: np.ndarray, lcp: np.ndarray, min_len: int) -> tuple[np.ndarray, np.ndarray]:
    """Two (length, start) candidates per adjacent suffix pair, filtered by min_len."""
    if len(sa) < 2:
        empty = np.empty(0, dtype=_I64)
        return empty, empty
    s1, s2, p = sa[:-1], sa[1:], lcp
    a = np.minimum(s1, s2)
    b = np.maximum(s1, s2)
    d = b - a
    disjoint = a + p <= b
    l = (p + d) // 2
    l = l - l % d
    lens = np.where(disjoint, p, l)
    first = np.where(disjoint, s1, a)
    second = np.where(disjoint, s2, a + l)
    out_len = np.empty(2 * len(p), dtype=_I64)
    out_start = np.empty(2 * len(p), dtype=_I64)
    out_len[0::2] = lens
    out_len[1::2] = lens
    out_start[0::2] = first
    out_start[1::2] = second
    keep = out_len >= min_len
    return out_len[keep], out_start[keep]


def substring_ids(sa: np.ndarray, lcp: np.ndarray, lens: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Dense id per candidate: the smallest suffix rank sharing its prefix.

    Equal sub-strings get equal ids, and for a fixed length the ids order
    sub-strings lexicographically.  Computed offline with a union-find over
    rank-adjacent pairs, merging pairs in decreasing LCP order while
    candidates are visited in decreasing length order.
    """
    n = len(sa)
    rank = [0] * n
    for i, p in enumerate(sa.tolist()):
        rank[p] = i
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    lcpl = lcp.tolist()
    edges = np.argsort(-lcp, kind="stable").tolist()
    lens_l = lens.tolist()
    starts_l = starts.tolist()
    ids = [0] * len(lens_l)
    e = 0
    for c in np.argsort(-lens, kind="stable").tolist():
        length = lens_l[c]
        while e < len(edges) and lcpl[edges[e]] >= length:
            ra, rb = find(edges[e]), find(edges[e] + 1)
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
            e += 1
        ids[c] = find(rank[starts_l[c]])
    return np.asarray(ids, dtype=_I64)


def select(n: int, lens: np.ndarray, ids: np.ndarray, starts: np.ndarray):
    """Greedy disjoint selection in (-length, start, id) order with dedup."""
    order = np.lexsort((ids, starts, -lens)).tolist()
    lens_l, ids_l, starts_l = lens.tolist(), ids.tolist(), starts.tolist()
    marked = bytearray(n)
    out_len, out_id, out_start = [], [], []
    prev = None
    for c in order:
        key = (lens_l[c], ids_l[c], starts_l[c])
        if key == prev:
            continue
        prev = key
        length, s = key[0], key[2]
        # every earlier selection is at least as long, so endpoints suffice
        if marked[s] or marked[s + length - 1]:
            continue
        marked[s : s + length] = b"\x01" * length
        out_len.append(length)
        out_id.append(key[1])
        out_start.append(s)
    return (
        np.asarray(out_len, dtype=_I64),
        np.asarray(out_id, dtype=_I64),
        np.asarray(out_start, dtype=_I64),
    )


def longest_disjoint_pair(sa: np.ndarray, lcp: np.ndarray) -> tuple[int, int, int]:
    """Longest sub-string with two non-overlapping occurrences.

    Bottom-up walk over LCP intervals tracking the smallest and largest
    start position below each one; an interval of depth D spanning
    positions [lo, hi] admits a disjoint repeat of length min(D, hi - lo).
    Returns (length, first_start, second_start), length 0 if none.
    """
    n = len(sa)
    if n < 2:
        return 0, 0, 0
    sal, lcpl = sa.tolist(), lcp.tolist()
    best = (0, 0, 0)
    stack = [[0, sal[0], sal[0]]]
    for i in range(1, n + 1):
        h = lcpl[i - 1] if i < n else 0
        cmn = cmx = sal[i - 1]
        while stack[-1][0] > h:
            d, a, b = stack.pop()
            a, b = min(a, cmn), max(b, cmx)
            length = min(d, b - a)
            if length > best[0]:
                best = (length, a, b)
            cmn, cmx = a, b
        top = stack[-1]
        if top[0] < h:
            stack.append([h, cmn, cmx])
            top = stack[-1]
        else:
            top[1], top[2] = min(top[1], cmn), max(top[2], cmx)
        if i < n:
            top[1], top[2] = min(top[1], sal[i]), max(top[2], sal[i])
    return best


def with_longest(sa, lcp, lens, starts, min_len: int, pair_fn):
    """Append the longest disjoint repeat when adjacent pairs missed it."""
    length, a, b = pair_fn(sa, lcp)
    top = int(lens.max()) if len(lens) else 0
    if length > top and length >= min_len:
        lens = np.concatenate((lens, np.array([length, length], dtype=_I64)))
        starts = np.concatenate((starts, np.array([a, b], dtype=_I64)))
    return lens, starts


def mine(s: np.ndarray, min_len: int):
    n = len(s)
    if n < 2 * min_len or n < 2:
        empty = np.empty(0, dtype=_I64)
        return empty, empty, empty
    sa = suffix_array(s)
    lcp = lcp_array(s, sa)
    lens, starts = candidates(sa, lcp, min_len)
    lens, starts = with_longest(sa, lcp, lens, starts, min_len, longest_disjoint_pair)
    ids = substring_ids(sa, lcp, lens, starts)
    return select(n, lens, ids, starts)
