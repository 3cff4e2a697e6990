"""Pure-Python kernels: the hot inner loops, mirrored by ``_kernels.pyx``.

Both implementations run the identical level-by-level recurrences and create
nodes in the identical order, so they produce bit-for-bit equal diagrams;
the compiled variant is just faster.  Selection happens in
:mod:`fape.backend`.
"""


def build_tables(masks, k_size, tau, g):
    """Bottom-up reduced-diagram build over member bitmasks.

    ``masks[i]`` is the satisfied-member bitmask of item ``i+1``.  Walks the
    items from the last to the first, keeping one table of partial states
    (package size so far, satisfied members so far) per level.  A cell's
    1-child advances both; its 0-child keeps them.  Cells whose 1-child is
    bottom collapse to their 0-child and cells sharing (hi, lo) within a
    level merge, so the produced diagram is reduced from the start.

    Returns ``(vars, los, his, root)`` where the parallel lists describe the
    created branch nodes with local ids starting at 2 (0 and 1 are the
    terminals), children before parents, and ``root`` is a local id.
    """
    masks = [int(m) for m in masks]
    n = len(masks)
    hs = 1 << g
    k1 = k_size + 1
    popcount = [0] * hs
    for h in range(1, hs):
        popcount[h] = popcount[h >> 1] + (h & 1)

    s_next = [0] * (hs * k1)
    s_cur = [0] * (hs * k1)
    out_var = []
    out_lo = []
    out_hi = []
    next_id = 2

    for i in range(n, 0, -1):
        si = masks[i - 1]
        level = {}
        last = i == n
        for h in range(hs):
            h2 = h | si
            base = h * k1
            base2 = h2 * k1
            if last:
                full = popcount[h] >= tau
                full2 = popcount[h2] >= tau
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
                    key = (hi_id << 32) | lo_id
                    node = level.get(key)
                    if node is None:
                        node = next_id
                        next_id += 1
                        level[key] = node
                        out_var.append(i)
                        out_lo.append(lo_id)
                        out_hi.append(hi_id)
                    s_cur[base + k] = node
        s_cur, s_next = s_next, s_cur

    return out_var, out_lo, out_hi, s_next[0]


def max_satisfaction(masks, k_size, g):
    """Largest number of members coverable by any ``k_size``-item package.

    Boolean table over (satisfied-member set, package size), swept forward
    over the items: keeping an item ORs its mask into the state and bumps
    the size; skipping it carries the state over.
    """
    masks = [int(m) for m in masks]
    hs = 1 << g
    k1 = k_size + 1
    prev = bytearray(hs * k1)
    prev[0] = 1
    for si in masks:
        cur = bytearray(prev)
        for h in range(hs):
            base = h * k1
            base2 = (h | si) * k1
            for k in range(k_size):
                if prev[base + k]:
                    cur[base2 + k + 1] = 1
        prev = cur
    best = 0
    for h in range(hs):
        if prev[h * k1 + k_size]:
            bits = bin(h).count("1")
            if bits > best:
                best = bits
    return best
