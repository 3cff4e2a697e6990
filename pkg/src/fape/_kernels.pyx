# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernels: the hot inner loops, mirrored by ``_kernels_py.py``.

Same recurrences, same node-creation order, same results; this variant is
what makes large universes practical.  The per-level duplicate table is an
epoch-stamped open-addressing map so it resets in O(1) between levels.
"""

from libc.string cimport memcpy
from libcpp.vector cimport vector

import numpy as np

cdef extern from *:
    int __builtin_popcountll(unsigned long long x)

ctypedef long long i64
ctypedef unsigned long long u64


cdef inline long long _slot(unsigned long long key, long long mask) noexcept:
    return <long long> ((key * <unsigned long long> 0x9E3779B97F4A7C15ULL) >> 29) & mask


def build_tables(long long[::1] masks, long long k_size, long long tau, long long g):
    """Bottom-up reduced-diagram build over member bitmasks.

    ``masks[i]`` is the satisfied-member bitmask of item ``i+1``.  Returns
    ``(vars, los, his, root)`` as int64 numpy arrays plus a local root id;
    branch-node ids start at 2, children precede parents.
    """
    cdef long long n = masks.shape[0]
    cdef long long hs = 1LL << g
    cdef long long k1 = k_size + 1
    cdef long long cells = hs * k1

    cdef long long cap = 1
    while cap < 2 * cells:
        cap <<= 1
    cdef long long tmask = cap - 1
    cdef vector[u64] tkey = vector[u64](cap, 0)
    cdef vector[i64] tval = vector[i64](cap, 0)
    cdef vector[i64] tstamp = vector[i64](cap, -1)

    cdef vector[i64] s_next = vector[i64](cells, 0)
    cdef vector[i64] s_cur = vector[i64](cells, 0)
    cdef vector[i64] out_var, out_lo, out_hi

    cdef long long next_id = 2
    cdef long long i, h, h2, k, base, base2, hi_id, lo_id, slot, stamp
    cdef long long si
    cdef unsigned long long key
    cdef bint last, full, full2

    for i in range(n, 0, -1):
        si = masks[i - 1]
        stamp = n - i
        last = i == n
        full = False
        full2 = False
        for h in range(hs):
            h2 = h | si
            base = h * k1
            base2 = h2 * k1
            if last:
                full = __builtin_popcountll(<unsigned long long> h) >= tau
                full2 = __builtin_popcountll(<unsigned long long> h2) >= tau
            for k in range(k1):
                if last:
                    # edges out of the deepest level go straight to a terminal
                    hi_id = 1 if (full2 and k == k_size - 1) else 0
                    lo_id = 1 if (full and k == k_size) else 0
                elif k == k_size:
                    hi_id = 0
                    lo_id = s_next[base + k]
                else:
                    hi_id = s_next[base2 + k + 1]
                    lo_id = s_next[base + k]
                if hi_id == 0:
                    s_cur[base + k] = lo_id
                else:
                    key = (<unsigned long long> hi_id << 32) | <unsigned long long> lo_id
                    slot = _slot(key, tmask)
                    while tstamp[slot] == stamp and tkey[slot] != key:
                        slot = (slot + 1) & tmask
                    if tstamp[slot] == stamp:
                        s_cur[base + k] = tval[slot]
                    else:
                        tstamp[slot] = stamp
                        tkey[slot] = key
                        tval[slot] = next_id
                        out_var.push_back(i)
                        out_lo.push_back(lo_id)
                        out_hi.push_back(hi_id)
                        s_cur[base + k] = next_id
                        next_id += 1
        s_cur.swap(s_next)

    # keep only the cone reachable from the root, preserving creation order
    cdef long long root = s_next[0]
    cdef long long m = <long long> out_var.size()
    if root < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy(), root
    cdef vector[char] reach = vector[char](m, 0)
    reach[root - 2] = 1
    cdef long long idx, c, kept = 0
    for idx in range(root - 2, -1, -1):
        if reach[idx]:
            kept += 1
            c = out_lo[idx]
            if c >= 2:
                reach[c - 2] = 1
            c = out_hi[idx]
            if c >= 2:
                reach[c - 2] = 1
    var_arr = np.empty(kept, dtype=np.int64)
    lo_arr = np.empty(kept, dtype=np.int64)
    hi_arr = np.empty(kept, dtype=np.int64)
    cdef long long[::1] vv = var_arr
    cdef long long[::1] lv = lo_arr
    cdef long long[::1] hv = hi_arr
    cdef vector[i64] mapped = vector[i64](m + 2, 0)
    mapped[1] = 1
    cdef long long nxt = 0
    for idx in range(root - 1):
        if reach[idx]:
            mapped[idx + 2] = nxt + 2
            vv[nxt] = out_var[idx]
            lv[nxt] = mapped[out_lo[idx]]
            hv[nxt] = mapped[out_hi[idx]]
            nxt += 1
    return var_arr, lo_arr, hi_arr, mapped[root]


def max_satisfaction(long long[::1] masks, long long k_size, long long g):
    """Largest number of members coverable by any ``k_size``-item package."""
    cdef long long n = masks.shape[0]
    cdef long long hs = 1LL << g
    cdef long long k1 = k_size + 1
    cdef long long cells = hs * k1
    cdef vector[char] prev = vector[char](cells, 0)
    cdef vector[char] cur = vector[char](cells, 0)
    prev[0] = 1
    cdef long long i, h, k, base, base2, si
    for i in range(n):
        si = masks[i]
        memcpy(cur.data(), prev.data(), cells)
        for h in range(hs):
            base = h * k1
            base2 = (h | si) * k1
            for k in range(k_size):
                if prev[base + k]:
                    cur[base2 + k + 1] = 1
        prev.swap(cur)
    cdef long long best = 0, bits
    for h in range(hs):
        if prev[h * k1 + k_size]:
            bits = __builtin_popcountll(<unsigned long long> h)
            if bits > best:
                best = bits
    return best
