# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled repeat-mining kernels.  Same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, uint8_t
from libcpp.algorithm cimport sort as cpp_sort

from autotrace import _kernels_py

cnp.import_array()


cdef void _suffix_array(const int64_t[:] s, int64_t sigma, int64_t[:] sa,
                        int64_t[:] rank, int64_t[:] tmp, int64_t[:] sa2,
                        int64_t[:] cnt) noexcept nogil:
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t i, j, p
    cdef int64_t k, classes, a, b, sa_, sb
    for i in range(sigma):
        cnt[i] = 0
    for i in range(n):
        cnt[s[i]] += 1
    for i in range(1, sigma):
        cnt[i] += cnt[i - 1]
    for i in range(n - 1, -1, -1):
        cnt[s[i]] -= 1
        sa[cnt[s[i]]] = i
    rank[sa[0]] = 0
    for j in range(1, n):
        rank[sa[j]] = rank[sa[j - 1]] + (s[sa[j]] != s[sa[j - 1]])
    classes = rank[sa[n - 1]] + 1
    k = 1
    while classes < n:
        p = 0
        for i in range(n - k, n):
            sa2[p] = i
            p += 1
        for j in range(n):
            if sa[j] >= k:
                sa2[p] = sa[j] - k
                p += 1
        for i in range(classes):
            cnt[i] = 0
        for i in range(n):
            cnt[rank[i]] += 1
        for i in range(1, classes):
            cnt[i] += cnt[i - 1]
        for j in range(n - 1, -1, -1):
            cnt[rank[sa2[j]]] -= 1
            sa[cnt[rank[sa2[j]]]] = sa2[j]
        tmp[sa[0]] = 0
        for j in range(1, n):
            a = sa[j - 1]
            b = sa[j]
            sa_ = rank[a + k] if a + k < n else -1
            sb = rank[b + k] if b + k < n else -1
            tmp[b] = tmp[a] + (0 if (rank[a] == rank[b] and sa_ == sb) else 1)
        for i in range(n):
            rank[i] = tmp[i]
        classes = rank[sa[n - 1]] + 1
        k *= 2


def suffix_array(s):
    cdef const int64_t[:] sv = np.ascontiguousarray(s, dtype=np.int64)
    cdef Py_ssize_t n = sv.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    cdef int64_t sigma = int(np.max(s)) + 1
    sa = np.empty(n, dtype=np.int64)
    rank = np.empty(n, dtype=np.int64)
    tmp = np.empty(n, dtype=np.int64)
    sa2 = np.empty(n, dtype=np.int64)
    cnt = np.empty(max(n, sigma), dtype=np.int64)
    cdef int64_t[:] v_sa = sa, v_rank = rank, v_tmp = tmp, v_sa2 = sa2, v_cnt = cnt
    with nogil:
        _suffix_array(sv, sigma, v_sa, v_rank, v_tmp, v_sa2, v_cnt)
    return sa


cdef void _lcp(const int64_t[:] s, const int64_t[:] sa, int64_t[:] rank,
               int64_t[:] lcp) noexcept nogil:
    cdef Py_ssize_t n = sa.shape[0]
    cdef Py_ssize_t i, j, r
    cdef int64_t h = 0
    for i in range(n):
        rank[sa[i]] = i
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sa[r + 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1


def lcp_array(s, sa):
    cdef const int64_t[:] sv = np.ascontiguousarray(s, dtype=np.int64)
    cdef const int64_t[:] sav = np.ascontiguousarray(sa, dtype=np.int64)
    cdef Py_ssize_t n = sav.shape[0]
    if n < 2:
        return np.empty(0, dtype=np.int64)
    rank = np.empty(n, dtype=np.int64)
    lcp = np.empty(n - 1, dtype=np.int64)
    cdef int64_t[:] v_rank = rank, v_lcp = lcp
    with nogil:
        _lcp(sv, sav, v_rank, v_lcp)
    return lcp


cdef Py_ssize_t _candidates(const int64_t[:] sa, const int64_t[:] lcp, int64_t min_len,
                            int64_t[:] out_len, int64_t[:] out_start) noexcept nogil:
    cdef Py_ssize_t i, m = 0
    cdef int64_t s1, s2, p, a, b, d, l
    for i in range(lcp.shape[0]):
        s1 = sa[i]
        s2 = sa[i + 1]
        p = lcp[i]
        if s1 < s2:
            a = s1
            b = s2
        else:
            a = s2
            b = s1
        if a + p <= b:
            if p >= min_len:
                out_len[m] = p
                out_start[m] = s1
                out_len[m + 1] = p
                out_start[m + 1] = s2
                m += 2
        else:
            d = b - a
            l = (p + d) // 2
            l -= l % d
            if l >= min_len:
                out_len[m] = l
                out_start[m] = a
                out_len[m + 1] = l
                out_start[m + 1] = a + l
                m += 2
    return m


def candidates(sa, lcp, int64_t min_len):
    cdef const int64_t[:] sav = np.ascontiguousarray(sa, dtype=np.int64)
    cdef const int64_t[:] lcpv = np.ascontiguousarray(lcp, dtype=np.int64)
    if sav.shape[0] < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    lens = np.empty(2 * lcpv.shape[0], dtype=np.int64)
    starts = np.empty(2 * lcpv.shape[0], dtype=np.int64)
    cdef int64_t[:] v_len = lens, v_start = starts
    cdef Py_ssize_t m
    with nogil:
        m = _candidates(sav, lcpv, min_len, v_len, v_start)
    return lens[:m].copy(), starts[:m].copy()


cdef inline int64_t _find(int64_t[:] parent, int64_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef void _substring_ids(const int64_t[:] sa, const int64_t[:] lcp, const int64_t[:] lens,
                         const int64_t[:] starts, int64_t[:] ids, int64_t[:] rank,
                         int64_t[:] parent, int64_t[:] edges, int64_t[:] order,
                         int64_t[:] cnt) noexcept nogil:
    cdef Py_ssize_t n = sa.shape[0], m = lens.shape[0], i, c, e
    cdef int64_t length, ra, rb, x
    for i in range(n):
        rank[sa[i]] = i
        parent[i] = i
    # edges by decreasing lcp (counting sort; lcp values < n)
    for i in range(n + 1):
        cnt[i] = 0
    for i in range(n - 1):
        cnt[n - lcp[i]] += 1
    for i in range(1, n + 1):
        cnt[i] += cnt[i - 1]
    for i in range(n - 2, -1, -1):
        cnt[n - lcp[i]] -= 1
        edges[cnt[n - lcp[i]]] = i
    # candidates by decreasing length
    for i in range(n + 1):
        cnt[i] = 0
    for i in range(m):
        cnt[n - lens[i]] += 1
    for i in range(1, n + 1):
        cnt[i] += cnt[i - 1]
    for i in range(m - 1, -1, -1):
        cnt[n - lens[i]] -= 1
        order[cnt[n - lens[i]]] = i
    e = 0
    for i in range(m):
        c = order[i]
        length = lens[c]
        while e < n - 1 and lcp[edges[e]] >= length:
            ra = _find(parent, edges[e])
            rb = _find(parent, edges[e] + 1)
            if ra < rb:
                parent[rb] = ra
            elif rb < ra:
                parent[ra] = rb
            e += 1
        ids[c] = _find(parent, rank[starts[c]])


def substring_ids(sa, lcp, lens, starts):
    cdef const int64_t[:] sav = np.ascontiguousarray(sa, dtype=np.int64)
    cdef const int64_t[:] lcpv = np.ascontiguousarray(lcp, dtype=np.int64)
    cdef const int64_t[:] lv = np.ascontiguousarray(lens, dtype=np.int64)
    cdef const int64_t[:] sv = np.ascontiguousarray(starts, dtype=np.int64)
    cdef Py_ssize_t n = sav.shape[0], m = lv.shape[0]
    ids = np.empty(m, dtype=np.int64)
    if m == 0:
        return ids
    cdef int64_t[:] v_ids = ids
    cdef int64_t[:] rank = np.empty(n, dtype=np.int64)
    cdef int64_t[:] parent = np.empty(n, dtype=np.int64)
    cdef int64_t[:] edges = np.empty(max(n - 1, 1), dtype=np.int64)
    cdef int64_t[:] order = np.empty(m, dtype=np.int64)
    cdef int64_t[:] cnt = np.empty(n + 1, dtype=np.int64)
    with nogil:
        _substring_ids(sav, lcpv, lv, sv, v_ids, rank, parent, edges, order, cnt)
    return ids


cdef Py_ssize_t _select(Py_ssize_t n, const int64_t[:] lens, const int64_t[:] ids,
                        const int64_t[:] starts, uint64_t[:] keys, int64_t[:] cnt,
                        int64_t[:] bucket_len, uint8_t[:] marked, int64_t[:] out_len,
                        int64_t[:] out_id, int64_t[:] out_start) noexcept nogil:
    cdef Py_ssize_t m = lens.shape[0], i, lo, hi, sel = 0
    cdef int64_t length, s, ident, q
    cdef uint64_t key, prev
    cdef uint64_t un = <uint64_t>n
    # bucket by decreasing length, then sort each bucket by (start, id)
    for i in range(n + 1):
        cnt[i] = 0
    for i in range(m):
        cnt[n - lens[i]] += 1
    for i in range(1, n + 1):
        cnt[i] += cnt[i - 1]
    for i in range(m - 1, -1, -1):
        cnt[n - lens[i]] -= 1
        q = cnt[n - lens[i]]
        keys[q] = <uint64_t>starts[i] * un + <uint64_t>ids[i]
        bucket_len[q] = lens[i]
    lo = 0
    while lo < m:
        hi = lo
        while hi < m and bucket_len[hi] == bucket_len[lo]:
            hi += 1
        cpp_sort(&keys[lo], &keys[lo] + (hi - lo))
        length = bucket_len[lo]
        prev = <uint64_t>(-1)
        for i in range(lo, hi):
            key = keys[i]
            if key == prev:
                continue
            prev = key
            s = <int64_t>(key // un)
            ident = <int64_t>(key % un)
            if marked[s] or marked[s + length - 1]:
                continue
            for q in range(s, s + length):
                marked[q] = 1
            out_len[sel] = length
            out_id[sel] = ident
            out_start[sel] = s
            sel += 1
        lo = hi
    return sel


def select(Py_ssize_t n, lens, ids, starts):
    cdef const int64_t[:] lv = np.ascontiguousarray(lens, dtype=np.int64)
    cdef const int64_t[:] iv = np.ascontiguousarray(ids, dtype=np.int64)
    cdef const int64_t[:] sv = np.ascontiguousarray(starts, dtype=np.int64)
    cdef Py_ssize_t m = lv.shape[0]
    out_len = np.empty(m, dtype=np.int64)
    out_id = np.empty(m, dtype=np.int64)
    out_start = np.empty(m, dtype=np.int64)
    if m == 0:
        return out_len, out_id, out_start
    cdef uint64_t[:] keys = np.empty(m, dtype=np.uint64)
    cdef int64_t[:] cnt = np.empty(n + 1, dtype=np.int64)
    cdef int64_t[:] bucket_len = np.empty(m, dtype=np.int64)
    cdef uint8_t[:] marked = np.zeros(n, dtype=np.uint8)
    cdef int64_t[:] v_len = out_len, v_id = out_id, v_start = out_start
    cdef Py_ssize_t sel
    with nogil:
        sel = _select(n, lv, iv, sv, keys, cnt, bucket_len, marked, v_len, v_id, v_start)
    return out_len[:sel].copy(), out_id[:sel].copy(), out_start[:sel].copy()


def longest_disjoint_pair(sa, lcp):
    cdef const int64_t[:] sav = np.ascontiguousarray(sa, dtype=np.int64)
    cdef const int64_t[:] lcpv = np.ascontiguousarray(lcp, dtype=np.int64)
    cdef Py_ssize_t n = sav.shape[0], i, top = 0
    if n < 2:
        return 0, 0, 0
    cdef int64_t[:] sd = np.empty(n + 1, dtype=np.int64)
    cdef int64_t[:] smn = np.empty(n + 1, dtype=np.int64)
    cdef int64_t[:] smx = np.empty(n + 1, dtype=np.int64)
    cdef int64_t h, cmn, cmx, d, a, b, length
    cdef int64_t best = 0, best_a = 0, best_b = 0
    with nogil:
        sd[0] = 0
        smn[0] = sav[0]
        smx[0] = sav[0]
        for i in range(1, n + 1):
            h = lcpv[i - 1] if i < n else 0
            cmn = sav[i - 1]
            cmx = sav[i - 1]
            while sd[top] > h:
                d = sd[top]
                a = smn[top] if smn[top] < cmn else cmn
                b = smx[top] if smx[top] > cmx else cmx
                top -= 1
                length = d if d < b - a else b - a
                if length > best:
                    best = length
                    best_a = a
                    best_b = b
                cmn = a
                cmx = b
            if sd[top] < h:
                top += 1
                sd[top] = h
                smn[top] = cmn
                smx[top] = cmx
            else:
                if cmn < smn[top]:
                    smn[top] = cmn
                if cmx > smx[top]:
                    smx[top] = cmx
            if i < n:
                if sav[i] < smn[top]:
                    smn[top] = sav[i]
                if sav[i] > smx[top]:
                    smx[top] = sav[i]
    return best, best_a, best_b


def mine(s, int64_t min_len):
    cdef Py_ssize_t n = len(s)
    if n < 2 * min_len or n < 2:
        e = np.empty(0, dtype=np.int64)
        return e, e, e
    sa = suffix_array(s)
    lcp = lcp_array(s, sa)
    lens, starts = candidates(sa, lcp, min_len)
    lens, starts = _kernels_py.with_longest(sa, lcp, lens, starts, min_len, longest_disjoint_pair)
    ids = substring_ids(sa, lcp, lens, starts)
    return select(n, lens, ids, starts)
