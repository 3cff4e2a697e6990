"""Ratings ingestion, synthetic instances and group generation.

Rating files are delimiter-separated rows of ``user, item, rating`` with an
optional trailing timestamp.  User and item labels can be arbitrary strings;
they map to dense 1-based indices in order of first appearance.  The loaded
matrix is complete: never-observed cells default to 0, or to the user's
observed mean with ``impute="user_mean"``.
"""

from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Bad input data; messages carry the offending line number."""


class GroupGenError(RuntimeError):
    """Group sampling ran out of candidates for the requested constraint."""


@dataclass
class RatingMatrix:
    """Complete user-by-item preference matrix with provenance counts."""

    values: np.ndarray
    interactions: int
    user_labels: list = field(default_factory=list)
    item_labels: list = field(default_factory=list)

    @property
    def n_users(self):
        return self.values.shape[0]

    @property
    def n_items(self):
        return self.values.shape[1]


def load_ratings(path, sep="::", impute="zero", k_core=0):
    """Parse a ratings file into a dense :class:`RatingMatrix`.

    Duplicate (user, item) pairs keep the last occurrence, ordered by
    timestamp when the file has one, by file position otherwise.
    ``k_core > 0`` first drops users and items with fewer than ``k_core``
    interactions, repeatedly, until all survivors have enough.
    """
    if impute not in ("zero", "user_mean"):
        raise ValueError(f"unknown imputation {impute!r}")
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                raise DataError(f"line {lineno}: blank line")
            parts = line.split(sep)
            if len(parts) not in (3, 4):
                raise DataError(
                    f"line {lineno}: expected 3 or 4 fields, got {len(parts)}"
                )
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise DataError(f"line {lineno}: inconsistent field count")
            user, item = parts[0].strip(), parts[1].strip()
            if not user or not item:
                raise DataError(f"line {lineno}: empty user or item id")
            try:
                rating = float(parts[2])
            except ValueError:
                raise DataError(f"line {lineno}: bad rating {parts[2]!r}") from None
            if not np.isfinite(rating):
                raise DataError(f"line {lineno}: rating must be finite")
            if rating < 0:
                raise DataError(f"line {lineno}: negative rating {rating}")
            if width == 4:
                try:
                    ts = float(parts[3])
                except ValueError:
                    raise DataError(
                        f"line {lineno}: bad timestamp {parts[3]!r}"
                    ) from None
                order = (ts, lineno)
            else:
                order = (0.0, lineno)
            rows.append((user, item, rating, order))
    if not rows:
        raise DataError("line 1: empty ratings file")

    latest = {}
    for user, item, rating, order in rows:
        key = (user, item)
        if key not in latest or order > latest[key][0]:
            latest[key] = (order, rating)

    kept = set(latest)
    if k_core > 0:
        kept = _k_core(kept, k_core)
        if not kept:
            raise DataError(f"no interactions survive the {k_core}-core filter")

    users, items = {}, {}
    for user, item, _, _ in rows:
        if (user, item) in kept:
            users.setdefault(user, len(users) + 1)
            items.setdefault(item, len(items) + 1)

    values = np.zeros((len(users), len(items)))
    observed = np.zeros_like(values, dtype=bool)
    for (user, item), (_, rating) in latest.items():
        if (user, item) in kept:
            r, c = users[user] - 1, items[item] - 1
            values[r, c] = rating
            observed[r, c] = True
    if impute == "user_mean":
        for r in range(values.shape[0]):
            seen = observed[r]
            mean = values[r, seen].mean() if seen.any() else 0.0
            values[r, ~seen] = mean
    return RatingMatrix(values, len(kept), list(users), list(items))


def _k_core(pairs, k):
    pairs = set(pairs)
    while True:
        user_deg, item_deg = {}, {}
        for user, item in pairs:
            user_deg[user] = user_deg.get(user, 0) + 1
            item_deg[item] = item_deg.get(item, 0) + 1
        bad_users = {u for u, d in user_deg.items() if d < k}
        bad_items = {i for i, d in item_deg.items() if d < k}
        if not bad_users and not bad_items:
            return pairs
        pairs = {
            (u, i) for u, i in pairs if u not in bad_users and i not in bad_items
        }
        if not pairs:
            return pairs


def synthetic_ratings(n_users, n_items, seed=0):
    """Uniform random complete matrix, handy for scaling runs and tests."""
    rng = np.random.default_rng(seed)
    return RatingMatrix(rng.random((n_users, n_items)), n_users * n_items)


def pearson(ratings, u, v):
    """Correlation of two users' full rating rows; 0 when either is flat."""
    values = getattr(ratings, "values", ratings)
    arr = np.asarray(values, dtype=float)
    a = arr[u - 1] - arr[u - 1].mean()
    b = arr[v - 1] - arr[v - 1].mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    if denom == 0:
        return 0.0
    return float(np.clip((a * b).sum() / denom, -1.0, 1.0))


def gen_group(
    ratings,
    g,
    strategy="random",
    seed=0,
    c_sim=0.0,
    c_div=0.0,
    max_retries=50,
):
    """Sample a group of ``g`` distinct users (1-based indices).

    ``random`` draws uniformly without replacement.  ``similar`` grows the
    group one member at a time among users correlating at least ``c_sim``
    with every member so far; ``divergent`` requires correlation at most
    ``c_div`` with the nearest member.  Both restart from scratch when they
    dead-end, up to ``max_retries`` times.
    """
    values = getattr(ratings, "values", ratings)
    arr = np.asarray(values, dtype=float)
    n_users = arr.shape[0]
    if not 1 <= g <= n_users:
        raise ValueError(f"group size must be in 1..{n_users}")
    if strategy not in ("random", "similar", "divergent"):
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = np.random.default_rng(seed)
    if strategy == "random":
        picks = rng.choice(n_users, size=g, replace=False)
        return [int(u) + 1 for u in picks]

    threshold = c_sim if strategy == "similar" else c_div
    cache = {}

    def pcc(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            cache[key] = pearson(arr, a, b)
        return cache[key]

    for _ in range(max_retries):
        members = [int(rng.integers(n_users)) + 1]
        while len(members) < g:
            candidates = []
            for u in range(1, n_users + 1):
                if u in members:
                    continue
                if strategy == "similar":
                    ok = all(pcc(u, s) >= threshold for s in members)
                else:
                    ok = min(pcc(u, s) for s in members) <= threshold
                if ok:
                    candidates.append(u)
            if not candidates:
                break
            members.append(candidates[int(rng.integers(len(candidates)))])
        if len(members) == g:
            return members
    raise GroupGenError(
        f"{strategy} grouping found no candidates within {max_retries} "
        f"restarts (threshold {threshold})"
    )


def write_groups(path, groups):
    """One group per line, comma-separated 1-based user indices."""
    with open(path, "w", encoding="utf-8") as fh:
        for group in groups:
            fh.write(",".join(str(u) for u in group) + "\n")


def read_groups(path):
    groups = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                group = [int(tok) for tok in line.split(",")]
            except ValueError:
                raise DataError(f"line {lineno}: bad group line {line!r}") from None
            if not group or len(set(group)) != len(group) or min(group) < 1:
                raise DataError(f"line {lineno}: invalid group {line!r}")
            groups.append(group)
    if not groups:
        raise DataError("line 1: no groups in file")
    return groups
