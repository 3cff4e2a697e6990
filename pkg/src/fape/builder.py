"""Direct bottom-up construction of fair-package families as reduced ZDDs.

The builder never materializes an unreduced diagram: level tables collapse
zero-suppressed cells and merge duplicate (hi, lo) pairs as they go (the
kernels do the hot m=1 loops; the packed-counter variant here covers m > 1).
The finished node block is then adopted into a shared
:class:`~fape.zdd.ZddStore`, keeping only nodes reachable from the root, so
the results compose with the whole family algebra without conversion.
"""

import numpy as np

from .backend import get_kernels
from .fairness import (
    counter_bits,
    packed_states,
    saturated_count,
    saturating_add,
)
from .zdd import BOTTOM, ZddHandle, ZddStore


def build_fair_zdd(liked, k_size, tau, m=1, store=None, backend=None):
    """Reduced ZDD of every ``k_size``-package satisfying at least ``tau`` members.

    Fairness follows ``liked`` (either criterion) with the at-least-``m``
    liked-items rule.  A fresh store sized to the item universe is created
    unless ``store`` is given.
    """
    n = liked.n
    g = liked.g
    if not 1 <= tau <= g:
        raise ValueError(f"tau must be in 1..{g}")
    if not 1 <= k_size <= n:
        raise ValueError(f"package size must be in 1..{n}")
    if not 1 <= m <= k_size:
        raise ValueError(f"m must be in 1..{k_size}")
    if store is None:
        store = ZddStore(n)
    elif store.n != n:
        raise ValueError(f"store universe {store.n} does not match {n} items")
    if m == 1:
        kernels = get_kernels(backend)
        masks = np.ascontiguousarray(np.asarray(liked.masks, dtype=np.int64))
        tables = kernels.build_tables(masks, k_size, tau, g)
    else:
        tables = _build_tables_multi(liked.masks, k_size, tau, m, g)
    return adopt_tables(store, *tables)


def _build_tables_multi(masks, k_size, tau, m, g):
    """Packed-counter generalization of the kernel build (any m).

    States are per-member counters saturating at ``m``, packed into one
    integer; a member counts as satisfied once its counter hits ``m``.
    Matches the kernels bit for bit when ``m`` is 1.
    """
    n = len(masks)
    bits = counter_bits(m)
    states = packed_states(g, m)
    satisfied = {s: saturated_count(s, g, m, bits) >= tau for s in states}
    bumped = {}
    s_next = {}
    out_var = []
    out_lo = []
    out_hi = []
    next_id = 2

    for i in range(n, 0, -1):
        si = masks[i - 1]
        bump = bumped.get(si)
        if bump is None:
            bump = {s: saturating_add(s, si, m, bits) for s in states}
            bumped[si] = bump
        level = {}
        s_cur = {}
        last = i == n
        for state in states:
            state2 = bump[state]
            for k in range(k_size + 1):
                if last:
                    hi_id = 1 if (satisfied[state2] and k == k_size - 1) else 0
                    lo_id = 1 if (satisfied[state] and k == k_size) else 0
                elif k == k_size:
                    hi_id = 0
                    lo_id = s_next.get((state, k), 0)
                else:
                    hi_id = s_next.get((state2, k + 1), 0)
                    lo_id = s_next.get((state, k), 0)
                if hi_id == 0:
                    node = lo_id
                else:
                    key = (hi_id, lo_id)
                    node = level.get(key)
                    if node is None:
                        node = next_id
                        next_id += 1
                        level[key] = node
                        out_var.append(i)
                        out_lo.append(lo_id)
                        out_hi.append(hi_id)
                if node:
                    s_cur[(state, k)] = node
        s_next = s_cur

    return out_var, out_lo, out_hi, s_next.get((0, 0), 0)


def adopt_tables(store, var, lo, hi, root):
    """Register a locally built node block into a shared store.

    ``var``/``lo``/``hi`` describe branch nodes with local ids from 2 in
    children-first order.  Only nodes reachable from ``root`` are kept.  On
    a store that already holds nodes, every node goes through the unique
    table so canonicity is preserved; on a fresh store the block (already
    reduced and internally deduplicated) is appended wholesale.
    """
    if root < 2:
        return ZddHandle(store, int(root))
    # plain Python ints: they hash faster and serialize cleanly
    var = var.tolist() if hasattr(var, "tolist") else list(var)
    lo = lo.tolist() if hasattr(lo, "tolist") else list(lo)
    hi = hi.tolist() if hasattr(hi, "tolist") else list(hi)
    root = int(root)
    m = len(var)
    reach = bytearray(m)
    reach[root - 2] = 1
    for idx in range(root - 2, -1, -1):
        if reach[idx]:
            c = lo[idx]
            if c >= 2:
                reach[c - 2] = 1
            c = hi[idx]
            if c >= 2:
                reach[c - 2] = 1

    mapped = [0] * (m + 2)
    mapped[1] = 1
    if len(store) == 2:
        # fresh store: straight append, ids stay in creation order
        svar, slo, shi = store._var, store._lo, store._hi
        unique = store._unique
        for idx in range(m):
            if reach[idx]:
                node = len(svar)
                v, l, h = var[idx], mapped[lo[idx]], mapped[hi[idx]]
                svar.append(v)
                slo.append(l)
                shi.append(h)
                unique[(v, l, h)] = node
                mapped[idx + 2] = node
    else:
        for idx in range(m):
            if reach[idx]:
                mapped[idx + 2] = store._make(
                    var[idx], mapped[lo[idx]], mapped[hi[idx]]
                )
    return ZddHandle(store, mapped[root])


# -- category constraints ---------------------------------------------------


def build_same_category(categories, k_size, store=None):
    """All ``k_size``-subsets whose items share a single category.

    ``categories[i - 1]`` is the category of item i.  Built as the union of
    per-category power sets, cut down to exactly ``k_size`` items.
    """
    n = len(categories)
    if store is None:
        store = ZddStore(n)
    elif store.n != n:
        raise ValueError(f"store universe {store.n} does not match {n} items")
    by_cat = {}
    for item, cat in enumerate(categories, start=1):
        by_cat.setdefault(cat, []).append(item)
    acc = store.bottom
    for cat in sorted(by_cat, key=repr):
        acc = acc.union(store.power_set(by_cat[cat]))
    return acc.intersect(store.all_k_subsets(k_size))


def build_distinct_category(categories, k_size, store=None):
    """All ``k_size``-subsets with pairwise distinct categories.

    Level dynamic program in the same bottom-up style as the fair-package
    build, with the used-category set as the state.
    """
    n = len(categories)
    if store is None:
        store = ZddStore(n)
    elif store.n != n:
        raise ValueError(f"store universe {store.n} does not match {n} items")
    labels = sorted(set(categories), key=repr)
    if len(labels) > 25:
        raise ValueError("at most 25 distinct categories are supported")
    cat_bit = {c: 1 << i for i, c in enumerate(labels)}
    bits = [cat_bit[categories[i - 1]] for i in range(1, n + 1)]

    # forward pass: states (chosen count, used-category mask) reachable at
    # each level; keeps the backward tables sparse
    reach = [None] * (n + 2)
    reach[1] = {(0, 0)}
    for i in range(1, n + 1):
        cur = reach[i]
        nxt = set(cur)
        b = bits[i - 1]
        for k, used in cur:
            if k < k_size and not used & b:
                nxt.add((k + 1, used | b))
        reach[i + 1] = nxt

    s_next = {
        (k, used): 1 if k == k_size else 0 for (k, used) in reach[n + 1]
    }
    out_var = []
    out_lo = []
    out_hi = []
    next_id = 2
    for i in range(n, 0, -1):
        b = bits[i - 1]
        level = {}
        s_cur = {}
        for k, used in sorted(reach[i]):
            lo_id = s_next.get((k, used), 0)
            if k == k_size or used & b:
                hi_id = 0
            else:
                hi_id = s_next.get((k + 1, used | b), 0)
            if hi_id == 0:
                node = lo_id
            else:
                key = (hi_id, lo_id)
                node = level.get(key)
                if node is None:
                    node = next_id
                    next_id += 1
                    level[key] = node
                    out_var.append(i)
                    out_lo.append(lo_id)
                    out_hi.append(hi_id)
            if node:
                s_cur[(k, used)] = node
        s_next = s_cur
    return adopt_tables(store, out_var, out_lo, out_hi, s_next.get((0, 0), 0))


# -- bi-criteria frontier ----------------------------------------------------


def pareto_frontier(liked_a, liked_b, k_size, store=None, backend=None):
    """Trade-off curve between the two criteria's thresholds.

    For every threshold ``tau`` on the first criterion with any qualifying
    package at all, reports the largest ``tau_b`` such that some package
    clears both bars simultaneously (0 when none clears even ``tau_b`` = 1).
    The reported values never increase as ``tau`` grows.
    """
    if liked_a.g != liked_b.g:
        raise ValueError("criteria must be over the same group")
    if liked_a.n != liked_b.n:
        raise ValueError("criteria must cover the same items")
    g = liked_a.g
    if store is None:
        store = ZddStore(liked_a.n)
    b_families = [
        build_fair_zdd(liked_b, k_size, tb, store=store, backend=backend)
        for tb in range(1, g + 1)
    ]
    frontier = []
    ceiling = g
    for tau in range(1, g + 1):
        fam = build_fair_zdd(liked_a, k_size, tau, store=store, backend=backend)
        if fam.root == BOTTOM:
            break
        best = 0
        for tb in range(ceiling, 0, -1):
            if not fam.intersect(b_families[tb - 1]).is_empty():
                best = tb
                break
        frontier.append((tau, best))
        ceiling = best if best else ceiling
    return frontier
