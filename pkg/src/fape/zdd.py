"""Zero-suppressed decision diagrams (ZDDs) over a fixed item universe.

A ZDD represents a family of item sets as a rooted DAG with two terminals,
bottom (id 0, the empty family) and top (id 1, the family containing only
the empty set).  Every branch node carries an item index and two outgoing
edges; a root-to-top path spells out one member set via the items whose
1-edge the path takes.  Items are numbered 1..n and node labels strictly
increase along every edge.

The store is hash-consed and append-only: each (var, lo, hi) triple exists
at most once and nodes whose 1-edge would point to bottom are never created
(they collapse to their 0-child).  Two handles on the same store therefore
represent the same family exactly when their root ids are equal.

One writer at a time may grow a store; once a write returns, any number of
readers may run the query operations concurrently.  Handles are plain
values and safe to pass between threads.

All traversals are iterative so diagrams over large universes (long 0-edge
chains) never hit the interpreter recursion limit.
"""

import heapq
import re

BOTTOM = 0
TOP = 1

OPS = ("union", "intersect", "difference")


class ZddParseError(ValueError):
    """Malformed ZDD text input; the message names the offending line."""


class ZddStore:
    """Shared, hash-consed node store for reduced ZDDs.

    ``universe_size`` fixes the item universe {1, ..., n}.  Node ids 0 and 1
    are the bottom and top terminals; branch nodes start at id 2.
    """

    def __init__(self, universe_size):
        n = int(universe_size)
        if n < 0:
            raise ValueError("universe size must be nonnegative")
        self.n = n
        # parallel arrays indexed by node id; slots 0/1 are terminal padding
        self._var = [0, 0]
        self._lo = [0, 0]
        self._hi = [0, 0]
        self._unique = {}  # (var, lo, hi) -> node id
        self._counts = {BOTTOM: 0, TOP: 1}  # node id -> |family|, shared memo

    def __len__(self):
        """Total stored nodes including the two terminals."""
        return len(self._var)

    @property
    def bottom(self):
        return ZddHandle(self, BOTTOM)

    @property
    def top(self):
        return ZddHandle(self, TOP)

    def handle(self, node):
        self._check_node(node)
        return ZddHandle(self, node)

    def label(self, node):
        """Variable of a branch node; terminals sort after every item (n+1)."""
        return self._var[node] if node >= 2 else self.n + 1

    def node(self, node):
        """(var, lo, hi) of a branch node."""
        if node < 2:
            raise ValueError("terminals have no variable or children")
        return self._var[node], self._lo[node], self._hi[node]

    # -- construction -------------------------------------------------

    def make_node(self, var, lo, hi):
        """Hash-consed node creation at the handle level.

        Returns ``lo`` unchanged when ``hi`` is bottom (zero-suppression);
        otherwise returns the unique node for (var, lo, hi), creating it
        only if absent.
        """
        lo_id = self._root_of(lo)
        hi_id = self._root_of(hi)
        return ZddHandle(self, self._make(var, lo_id, hi_id))

    def _make(self, var, lo, hi):
        if not 1 <= var <= self.n:
            raise ValueError(f"item index {var} outside universe 1..{self.n}")
        self._check_node(lo)
        self._check_node(hi)
        if var >= self.label(lo) or var >= self.label(hi):
            raise ValueError(
                f"ordering violation: node {var} must precede children "
                f"labelled {self.label(lo)} and {self.label(hi)}"
            )
        if hi == BOTTOM:
            return lo
        key = (var, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self._var)
            self._var.append(var)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = node
        return node

    def family(self, sets):
        """ZDD of an explicit collection of item sets (duplicates ignored)."""
        acc = BOTTOM
        for s in sets:
            chain = TOP
            for item in sorted(set(s), reverse=True):
                chain = self._make(item, BOTTOM, chain)
            acc = self._apply("union", acc, chain)
        return ZddHandle(self, acc)

    def power_set(self, items):
        """Family of all subsets of ``items`` (the empty set included)."""
        node = TOP
        for item in sorted(set(items), reverse=True):
            node = self._make(item, node, node)
        return ZddHandle(self, node)

    def all_k_subsets(self, k):
        """Family of all k-subsets of the full universe."""
        k = int(k)
        if k < 0:
            raise ValueError("subset size must be nonnegative")
        if k > self.n:
            return self.bottom
        # prev[r] = family of r-subsets of {i..n}, walking i downward
        prev = [TOP] + [BOTTOM] * k
        for i in range(self.n, 0, -1):
            cur = [TOP]
            for r in range(1, k + 1):
                cur.append(self._make(i, prev[r], prev[r - 1]))
            prev = cur
        return ZddHandle(self, prev[k])

    # -- family algebra -----------------------------------------------

    def apply(self, op, a, b):
        """Reduced ZDD of A∪B, A∩B or A\\B.

        Memoized on node pairs within the call, so the cost is bounded by
        the number of distinct (a, b) subproblems.
        """
        if op not in OPS:
            raise ValueError(f"unknown operation {op!r}; expected one of {OPS}")
        ra = self._root_of(a)
        rb = self._root_of(b)
        return ZddHandle(self, self._apply(op, ra, rb))

    def _apply_terminal(self, op, a, b):
        if op == "union":
            if a == BOTTOM:
                return b
            if b == BOTTOM or a == b:
                return a
        elif op == "intersect":
            if a == BOTTOM or b == BOTTOM:
                return BOTTOM
            if a == b:
                return a
        else:  # difference
            if a == BOTTOM or a == b:
                return BOTTOM
            if b == BOTTOM:
                return a
        return None

    def _apply(self, op, ra, rb):
        memo = {}
        stack = [(ra, rb, False)]
        while stack:
            a, b, ready = stack.pop()
            key = (a, b)
            if not ready:
                if key in memo:
                    continue
                t = self._apply_terminal(op, a, b)
                if t is not None:
                    memo[key] = t
                    continue
                stack.append((a, b, True))
                for pa, pb in self._apply_children(op, a, b)[1]:
                    if (pa, pb) not in memo:
                        stack.append((pa, pb, False))
            else:
                var, pairs, keep_hi = self._apply_children(op, a, b)
                results = [memo[p] for p in pairs]
                if var is None:
                    memo[key] = results[0]
                elif keep_hi is not None:
                    # the var-labelled sets pass through unchanged
                    memo[key] = self._make(var, results[0], keep_hi)
                else:
                    memo[key] = self._make(var, results[0], results[1])
        return memo[(ra, rb)]

    def _apply_children(self, op, a, b):
        """Decompose one apply step: (var to rebuild, child pairs, kept hi)."""
        la = self.label(a)
        lb = self.label(b)
        if la == lb:
            pairs = [(self._lo[a], self._lo[b]), (self._hi[a], self._hi[b])]
            return la, pairs, None
        if la < lb:
            # no member of b contains item la
            if op == "intersect":
                return None, [(self._lo[a], b)], None
            return la, [(self._lo[a], b)], self._hi[a]  # union/difference
        # lb < la: no member of a contains item lb
        if op == "union":
            return lb, [(a, self._lo[b])], self._hi[b]
        return None, [(a, self._lo[b])], None

    def restrict(self, a, items, mode):
        """Fix or forbid items.

        ``superset`` keeps members that contain every item of ``items``;
        ``exclude`` keeps members disjoint from ``items``.
        """
        if mode not in ("superset", "exclude"):
            raise ValueError(f"unknown restrict mode {mode!r}")
        root = self._root_of(a)
        q = sorted(set(items))
        if q and not (1 <= q[0] and q[-1] <= self.n):
            raise ValueError(f"restriction items outside universe 1..{self.n}")
        if not q:
            return ZddHandle(self, root)
        if mode == "superset":
            return ZddHandle(self, self._restrict_superset(root, tuple(q)))
        return ZddHandle(self, self._restrict_exclude(root, frozenset(q)))

    def _restrict_superset(self, root, q):
        nq = len(q)
        memo = {}
        stack = [(root, 0, False)]
        while stack:
            v, j, ready = stack.pop()
            key = (v, j)
            if not ready:
                if key in memo:
                    continue
                if j == nq:
                    memo[key] = v
                    continue
                if v == BOTTOM or self.label(v) > q[j]:
                    memo[key] = BOTTOM
                    continue
                stack.append((v, j, True))
                if self._var[v] == q[j]:
                    stack.append((self._hi[v], j + 1, False))
                else:
                    stack.append((self._lo[v], j, False))
                    stack.append((self._hi[v], j, False))
            else:
                var = self._var[v]
                if var == q[j]:
                    memo[key] = self._make(var, BOTTOM, memo[(self._hi[v], j + 1)])
                else:
                    memo[key] = self._make(
                        var, memo[(self._lo[v], j)], memo[(self._hi[v], j)]
                    )
        return memo[(root, 0)]

    def _restrict_exclude(self, root, q):
        memo = {}
        stack = [(root, False)]
        while stack:
            v, ready = stack.pop()
            if not ready:
                if v in memo:
                    continue
                if v < 2:
                    memo[v] = v
                    continue
                stack.append((v, True))
                if self._var[v] in q:
                    stack.append((self._lo[v], False))
                else:
                    stack.append((self._lo[v], False))
                    stack.append((self._hi[v], False))
            else:
                if v in memo:
                    continue
                var = self._var[v]
                if var in q:
                    memo[v] = memo[self._lo[v]]
                else:
                    memo[v] = self._make(var, memo[self._lo[v]], memo[self._hi[v]])
        return memo[root]

    # -- queries ------------------------------------------------------

    def count(self, a):
        """Exact number of member sets (arbitrary precision)."""
        root = self._root_of(a)
        counts = self._counts
        if root not in counts:
            stack = [root]
            while stack:
                v = stack[-1]
                if v in counts:
                    stack.pop()
                    continue
                lo = self._lo[v]
                hi = self._hi[v]
                missing = [c for c in (lo, hi) if c not in counts]
                if missing:
                    stack.extend(missing)
                else:
                    counts[v] = counts[lo] + counts[hi]
                    stack.pop()
        return counts[root]

    def node_count(self, a):
        """Number of branch nodes reachable from the root (terminals excluded)."""
        return len(self._reachable(self._root_of(a)))

    def _reachable(self, root):
        if root < 2:
            return set()
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for c in (self._lo[v], self._hi[v]):
                if c >= 2 and c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def members(self, a, limit=None):
        """Yield member sets as sorted item tuples, lexicographically.

        The empty set sorts first; otherwise tuples compare element-wise,
        shorter prefixes first.  Stops after ``limit`` members when given.
        """
        root = self._root_of(a)
        if limit is not None:
            limit = int(limit)
            if limit <= 0:
                return
        emitted = 0
        chain, at_top = self._lo_chain(root)
        if at_top:
            yield ()
            emitted += 1
            if limit is not None and emitted >= limit:
                return
        stack = [((), chain, 0)]
        while stack:
            prefix, chain, idx = stack.pop()
            if idx >= len(chain):
                continue
            var, hi = chain[idx]
            stack.append((prefix, chain, idx + 1))
            extended = prefix + (var,)
            sub, at_top = self._lo_chain(hi)
            if at_top:
                yield extended
                emitted += 1
                if limit is not None and emitted >= limit:
                    return
            stack.append((extended, sub, 0))

    def _lo_chain(self, v):
        """(var, hi) pairs along the 0-edge chain; True if it ends at top."""
        chain = []
        while v >= 2:
            chain.append((self._var[v], self._hi[v]))
            v = self._lo[v]
        return chain, v == TOP

    def best_k(self, a, weights, k):
        """The k member sets with the largest item-weight sums, descending.

        Ties break toward the lexicographically smallest item tuple.  Fewer
        than k entries come back when the family is smaller.  Returns a list
        of (items, value) pairs.
        """
        k = int(k)
        if k < 1:
            raise ValueError("k must be positive")
        root = self._root_of(a)
        w = self._check_weights(weights)
        if root == BOTTOM:
            return []
        # exact best completion per reachable node; ids ascend children-first
        best_val = {TOP: 0.0}
        best_items = {TOP: ()}
        for v in sorted(self._reachable(root)):
            var = self._var[v]
            lo = self._lo[v]
            hi = self._hi[v]
            val = w[var - 1] + best_val[hi]
            items = (var,) + best_items[hi]
            if lo != BOTTOM:
                lval = best_val[lo]
                if lval > val or (lval == val and best_items[lo] < items):
                    val, items = lval, best_items[lo]
            best_val[v] = val
            best_items[v] = items

        # best-first expansion with exact completion bounds
        results = []
        heap = []

        def expand(prefix, value, v):
            while v >= 2:
                var, lo, hi = self._var[v], self._lo[v], self._hi[v]
                pv = value + w[var - 1]
                pi = prefix + (var,)
                heapq.heappush(
                    heap,
                    (-(pv + best_val[hi]), pi + best_items[hi], pi, pv, hi),
                )
                v = lo
            if v == TOP:
                heapq.heappush(heap, (-value, prefix, prefix, value, None))

        expand((), 0.0, root)
        while heap and len(results) < k:
            _, _, prefix, value, v = heapq.heappop(heap)
            if v is None:
                # recompute left-to-right for a reproducible reported value
                results.append((prefix, float(sum(w[i - 1] for i in prefix))))
            else:
                expand(prefix, value, v)
        return results

    def sampler(self, a, weights=None):
        """Reusable sampler; see :class:`PackageSampler`."""
        return PackageSampler(self, self._root_of(a), weights)

    def sample(self, a, rng, weights=None):
        """One member set drawn uniformly, or proportionally to its weight sum.

        ``rng`` is a seeded :class:`random.Random`-style source.  For
        repeated draws build a :meth:`sampler` once instead.
        """
        return PackageSampler(self, self._root_of(a), weights).draw(rng)

    def _check_weights(self, weights):
        w = [float(x) for x in weights]
        if len(w) != self.n:
            raise ValueError(f"expected {self.n} item weights, got {len(w)}")
        for x in w:
            if x != x or x in (float("inf"), float("-inf")):
                raise ValueError("item weights must be finite")
        return w

    # -- plumbing -----------------------------------------------------

    def _root_of(self, a):
        if isinstance(a, ZddHandle):
            if a.store is not self:
                raise ValueError("handle belongs to a different store")
            return a.root
        self._check_node(a)
        return a

    def _check_node(self, node):
        if not isinstance(node, int) or not 0 <= node < len(self._var):
            raise ValueError(f"unknown node id {node!r}")

    def __repr__(self):
        return f"ZddStore(n={self.n}, nodes={len(self._var) - 2})"


class ZddHandle:
    """A set family: a root node in a particular store.

    Canonical: within one store, equal families have equal roots.
    """

    __slots__ = ("store", "root")

    def __init__(self, store, root):
        self.store = store
        self.root = root

    @property
    def universe_size(self):
        return self.store.n

    def is_empty(self):
        return self.root == BOTTOM

    def count(self):
        return self.store.count(self.root)

    def node_count(self):
        return self.store.node_count(self.root)

    def union(self, other):
        return self.store.apply("union", self, other)

    def intersect(self, other):
        return self.store.apply("intersect", self, other)

    def difference(self, other):
        return self.store.apply("difference", self, other)

    def restrict(self, items, mode):
        return self.store.restrict(self, items, mode)

    def best_k(self, weights, k):
        return self.store.best_k(self, weights, k)

    def sample(self, rng, weights=None):
        return self.store.sample(self, rng, weights)

    def sampler(self, weights=None):
        return self.store.sampler(self, weights)

    def members(self, limit=None):
        return self.store.members(self, limit)

    def __iter__(self):
        return self.store.members(self)

    def __eq__(self, other):
        return (
            isinstance(other, ZddHandle)
            and other.store is self.store
            and other.root == self.root
        )

    def __hash__(self):
        return hash((id(self.store), self.root))

    def __repr__(self):
        return f"ZddHandle(root={self.root}, n={self.store.n})"


class PackageSampler:
    """Draws member sets from a fixed family.

    Uniform mode uses the exact member counts, so each member appears with
    probability 1/|A|.  Weighted mode aggregates weight sums bottom-up once
    and then walks the DAG top-down carrying the weight accumulated so far,
    which makes the draw probability exactly proportional to the member's
    item-weight sum (no rejection involved).
    """

    def __init__(self, store, root, weights=None):
        store._check_node(root)
        if root == BOTTOM:
            raise ValueError("cannot sample from an empty family")
        self._store = store
        self._root = root
        if weights is None:
            self._weights = None
            store.count(root)  # prime the shared count memo
        else:
            self._weights = store._check_weights(weights)
            self._prepare_weighted()

    def _prepare_weighted(self):
        store = self._store
        w = self._weights
        counts = {BOTTOM: 0, TOP: 1}
        sums = {BOTTOM: 0.0, TOP: 0.0}
        minw = {TOP: 0.0}
        for v in sorted(store._reachable(self._root)):
            var, lo, hi = store._var[v], store._lo[v], store._hi[v]
            wv = w[var - 1]
            counts[v] = counts[lo] + counts[hi]
            sums[v] = sums[lo] + sums[hi] + wv * counts[hi]
            m = wv + minw[hi]
            if lo != BOTTOM:
                m = min(m, minw[lo])
            minw[v] = m
        if minw[self._root] <= 0:
            raise ValueError(
                "weighted sampling requires every member's weight sum "
                "to be strictly positive"
            )
        self._wcounts = counts
        self._wsums = sums

    def draw(self, rng):
        """One member as a sorted item tuple; deterministic given the seed."""
        if self._weights is None:
            return self._draw_uniform(rng)
        return self._draw_weighted(rng)

    def _draw_uniform(self, rng):
        store = self._store
        counts = store._counts
        v = self._root
        items = []
        while v != TOP:
            lo = store._lo[v]
            if rng.randrange(counts[v]) >= counts[lo]:
                items.append(store._var[v])
                v = store._hi[v]
            else:
                v = lo
        return tuple(items)

    def _draw_weighted(self, rng):
        store = self._store
        w = self._weights
        counts = self._wcounts
        sums = self._wsums
        v = self._root
        acc = 0.0
        items = []
        while v != TOP:
            var, lo, hi = store._var[v], store._lo[v], store._hi[v]
            mass_lo = acc * counts[lo] + sums[lo]
            mass_hi = (acc + w[var - 1]) * counts[hi] + sums[hi]
            if rng.random() * (mass_lo + mass_hi) >= mass_lo:
                items.append(var)
                acc += w[var - 1]
                v = hi
            else:
                v = lo
        return tuple(items)


# -- structural checks ----------------------------------------------------


def verify_structure(handle):
    """Raise ValueError unless the reachable diagram is reduced and ordered.

    Checks: no 1-edge points to bottom, no two reachable nodes share a
    (var, lo, hi) triple, and labels strictly increase along edges.
    """
    store = handle.store
    triples = set()
    for v in store._reachable(handle.root):
        var, lo, hi = store._var[v], store._lo[v], store._hi[v]
        if hi == BOTTOM:
            raise ValueError(f"node {v} has a 1-edge to bottom")
        key = (var, lo, hi)
        if key in triples:
            raise ValueError(f"duplicate node for triple {key}")
        triples.add(key)
        if var >= store.label(lo) or var >= store.label(hi):
            raise ValueError(f"node {v} breaks the variable order")


# -- text serialization ----------------------------------------------------

_HEADER = re.compile(r"^zdd v1 (\d+) (\d+)$")


def serialize(handle):
    """UTF-8 text encoding of the reachable diagram.

    Line 1 is ``zdd v1 <n> <root-id>``; each further line describes one
    branch node as ``<id> <var> <lo-id> <hi-id>`` with ids assigned 2, 3, ...
    in a deterministic child-first order, so every reference points backward
    and re-serializing a deserialized diagram is byte-identical.
    """
    store = handle.store
    root = handle.root
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        v, ready = stack.pop()
        if v < 2:
            continue
        if ready:
            order.append(v)
            continue
        if v in visited:
            continue
        visited.add(v)
        stack.append((v, True))
        stack.append((store._hi[v], False))
        stack.append((store._lo[v], False))
    ids = {BOTTOM: 0, TOP: 1}
    for i, v in enumerate(order):
        ids[v] = i + 2
    lines = [f"zdd v1 {store.n} {ids[root]}"]
    for v in order:
        lines.append(
            f"{ids[v]} {store._var[v]} {ids[store._lo[v]]} {ids[store._hi[v]]}"
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def deserialize(data, store=None):
    """Parse the text format, re-canonicalizing through ``make_node``.

    A fresh store sized from the header is created unless ``store`` is
    given, in which case its universe must match.
    """
    if isinstance(data, (bytes, bytearray)):
        text = bytes(data).decode("utf-8")
    else:
        text = data
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ZddParseError("line 1: missing header")
    m = _HEADER.match(lines[0])
    if not m:
        raise ZddParseError(f"line 1: bad header {lines[0]!r}")
    n = int(m.group(1))
    root_ref = int(m.group(2))
    if store is None:
        store = ZddStore(n)
    elif store.n != n:
        raise ValueError(f"store universe {store.n} does not match header {n}")
    ids = {0: BOTTOM, 1: TOP}
    prev = 1
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if len(parts) != 4:
            raise ZddParseError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        try:
            node_id, var, lo_ref, hi_ref = (int(p) for p in parts)
        except ValueError:
            raise ZddParseError(f"line {lineno}: non-integer field") from None
        if node_id <= prev:
            raise ZddParseError(f"line {lineno}: node ids must ascend from 2")
        if lo_ref not in ids:
            raise ZddParseError(f"line {lineno}: undefined node id {lo_ref}")
        if hi_ref not in ids:
            raise ZddParseError(f"line {lineno}: undefined node id {hi_ref}")
        try:
            ids[node_id] = store._make(var, ids[lo_ref], ids[hi_ref])
        except ValueError as exc:
            raise ZddParseError(f"line {lineno}: {exc}") from None
        prev = node_id
    if root_ref not in ids:
        raise ZddParseError(f"line 1: root references undefined id {root_ref}")
    return ZddHandle(store, ids[root_ref])
