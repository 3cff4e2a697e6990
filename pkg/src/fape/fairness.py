"""Rating-derived fairness semantics for package-to-group recommendation.

Two notions of "member u is satisfied by item i" are supported:

* proportionality — item i sits in the top share of u's own rating row;
* envy-freeness — u's rating for i sits in the top share of the group's
  ratings for i.

Either way the per-item satisfied-member sets are all the downstream
algorithms ever look at; :class:`LikedSets` captures them as bitmasks over
group positions.  A package satisfies a member once it contains at least
``m`` items the member likes, and the fairness score of a package is the
number of satisfied members.
"""

import math
from dataclasses import dataclass

import numpy as np

from .backend import get_kernels

PROPORTIONALITY = "proportionality"
ENVY_FREENESS = "envy-freeness"

#: Hard cap on group size; the exact algorithms hold tables over all 2^g
#: member subsets, which stops fitting in memory beyond this.
MAX_GROUP = 25

_ALIASES = {
    "prop": PROPORTIONALITY,
    "proportionality": PROPORTIONALITY,
    "ef": ENVY_FREENESS,
    "envy": ENVY_FREENESS,
    "envy-freeness": ENVY_FREENESS,
    "envy_freeness": ENVY_FREENESS,
}


def normalize_criterion(criterion):
    try:
        return _ALIASES[str(criterion).strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown criterion {criterion!r}; expected 'prop' or 'ef'"
        ) from None


@dataclass(frozen=True)
class LikedSets:
    """Satisfied-member bitmasks per item.

    ``masks[i - 1]`` has bit b set when the member at group position b+1
    likes item i under the stated criterion and threshold.
    """

    masks: tuple
    g: int
    criterion: str
    delta: float

    def __post_init__(self):
        if not 1 <= self.g <= MAX_GROUP:
            raise ValueError(f"group size must be in 1..{MAX_GROUP}")
        full = (1 << self.g) - 1
        for mask in self.masks:
            if mask & ~full:
                raise ValueError("mask uses bits beyond the group size")

    @property
    def n(self):
        return len(self.masks)

    def members_for(self, item):
        """1-based group positions satisfied by ``item``."""
        mask = self.masks[item - 1]
        return tuple(b + 1 for b in range(self.g) if mask >> b & 1)


def matrix_values(ratings):
    """Validated dense rating matrix as a float array (users x items)."""
    values = getattr(ratings, "values", ratings)
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("ratings must be a nonempty 2-D matrix")
    if not np.isfinite(arr).all():
        raise ValueError("ratings must be finite")
    if (arr < 0).any():
        raise ValueError("ratings must be nonnegative")
    return arr


def check_group(group, n_users):
    members = [int(u) for u in group]
    if not members:
        raise ValueError("group must not be empty")
    if len(set(members)) != len(members):
        raise ValueError("group members must be distinct")
    if len(members) > MAX_GROUP:
        raise ValueError(f"group size must be at most {MAX_GROUP}")
    for u in members:
        if not 1 <= u <= n_users:
            raise ValueError(f"user index {u} outside 1..{n_users}")
    return members


def _top_share(delta, size):
    """How many of ``size`` ranks count as the top delta percent.

    Rounded before the ceiling so thresholds specified as fractions like
    2/g survive the float round trip as exact integer counts.
    """
    return min(size, math.ceil(round(delta * size / 100.0, 9)))


def liked_sets(ratings, group, delta, criterion):
    """Compute per-item satisfied-member masks from a rating matrix.

    Proportionality ranks each member's own row and keeps the top share of
    items; envy-freeness ranks the group's column per item and keeps the top
    share of members.  Rating ties rank the smaller item index (resp. the
    earlier group position) higher, so results are reproducible.
    """
    delta = float(delta)
    if not 0 < delta <= 100:
        raise ValueError("delta must be a percentage in (0, 100]")
    criterion = normalize_criterion(criterion)
    arr = matrix_values(ratings)
    members = check_group(group, arr.shape[0])
    g = len(members)
    n = arr.shape[1]
    masks = [0] * n
    if criterion == PROPORTIONALITY:
        t = _top_share(delta, n)
        for pos, u in enumerate(members):
            bit = 1 << pos
            top = np.argsort(-arr[u - 1], kind="stable")[:t]
            for col in top:
                masks[col] |= bit
    else:
        t = _top_share(delta, g)
        sub = arr[[u - 1 for u in members]]
        for col in range(n):
            for pos in np.argsort(-sub[:, col], kind="stable")[:t]:
                masks[col] |= 1 << int(pos)
    return LikedSets(tuple(masks), g, criterion, delta)


def satisfaction(package, liked, m=1):
    """Number of members with at least ``m`` liked items in the package."""
    if m < 1:
        raise ValueError("m must be positive")
    counts = [0] * liked.g
    for item in package:
        mask = liked.masks[item - 1]
        while mask:
            low = mask & -mask
            counts[low.bit_length() - 1] += 1
            mask ^= low
    return sum(1 for c in counts if c >= m)


def max_fairness(liked, k_size, m=1, backend=None):
    """Best achievable fairness over all packages of ``k_size`` items.

    Exact, via dynamic programming over satisfied-member states instead of
    the binomially many packages.
    """
    n = liked.n
    if not 1 <= k_size <= n:
        raise ValueError(f"package size must be in 1..{n}")
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        kernels = get_kernels(backend)
        masks = np.ascontiguousarray(np.asarray(liked.masks, dtype=np.int64))
        return int(kernels.max_satisfaction(masks, k_size, liked.g))
    return _max_fairness_multi(liked, k_size, m)


def _max_fairness_multi(liked, k_size, m):
    g = liked.g
    bits = counter_bits(m)
    reached = {(0, 0)}
    for si in liked.masks:
        nxt = set(reached)
        for k, state in reached:
            if k < k_size:
                nxt.add((k + 1, saturating_add(state, si, m, bits)))
        reached = nxt
    return max(
        (saturated_count(state, g, m, bits) for k, state in reached if k == k_size),
        default=0,
    )


# -- packed per-member counters (the m > 1 state encoding) -----------------


def counter_bits(m):
    """Bit width per member for counters saturating at ``m``."""
    return int(m).bit_length()


def saturating_add(state, mask, m, bits):
    """Bump the counter of every member in ``mask``, capping at ``m``."""
    while mask:
        low = mask & -mask
        shift = (low.bit_length() - 1) * bits
        if (state >> shift) & ((1 << bits) - 1) < m:
            state += 1 << shift
        mask ^= low
    return state


def saturated_count(state, g, m, bits):
    """Number of members whose counter reached ``m``."""
    field = (1 << bits) - 1
    return sum(1 for b in range(g) if (state >> (b * bits)) & field == m)


def packed_states(g, m):
    """All packed counter vectors in ascending numeric order."""
    bits = counter_bits(m)
    states = [0]
    for b in range(g):
        shift = b * bits
        states = [s + (v << shift) for s in states for v in range(m + 1)]
    return sorted(states)


# -- preference scores ------------------------------------------------------


def total_preference(package, ratings, group):
    """Summed group rating over the package's items."""
    arr = matrix_values(ratings)
    members = check_group(group, arr.shape[0])
    rows = [u - 1 for u in members]
    return float(sum(arr[rows, i - 1].sum() for i in package))


def group_preference_weights(ratings, group):
    """Per-item group rating sums, the natural preference weight vector."""
    arr = matrix_values(ratings)
    members = check_group(group, arr.shape[0])
    return [float(x) for x in arr[[u - 1 for u in members]].sum(axis=0)]


def rating_variance_weights(ratings, group):
    """Negated per-item rating variance within the group.

    Maximizing these weights favors items the members rated most alike,
    usable as an alternative fairness-flavored objective.
    """
    arr = matrix_values(ratings)
    members = check_group(group, arr.shape[0])
    sub = arr[[u - 1 for u in members]]
    return [float(x) for x in -sub.var(axis=0)]


def best_preference_package(ratings, group, k_size):
    """The package maximizing total preference: the top items by group sum."""
    weights = group_preference_weights(ratings, group)
    if not 1 <= k_size <= len(weights):
        raise ValueError(f"package size must be in 1..{len(weights)}")
    order = np.argsort(-np.asarray(weights), kind="stable")[:k_size]
    return tuple(sorted(int(i) + 1 for i in order))


@dataclass(frozen=True)
class ScoreTriple:
    """Normalized (fairness, fairness, preference) summary of one package.

    Each component lies in [0, 1]; ``total`` is their sum, at most 3.
    """

    prop_norm: float
    ef_norm: float
    pref_norm: float

    @property
    def total(self):
        return self.prop_norm + self.ef_norm + self.pref_norm

    def as_dict(self):
        return {
            "prop_norm": self.prop_norm,
            "ef_norm": self.ef_norm,
            "pref_norm": self.pref_norm,
            "total": self.total,
        }


def score_triple(package, ratings, group, liked_prop, liked_ef):
    """Score one package against both criteria and normalized preference.

    Fairness components divide by the group size; preference divides by the
    best achievable total preference at the same package size (defined as 0
    when that optimum is itself 0).
    """
    g = len(list(group))
    prop = satisfaction(package, liked_prop) / g
    ef = satisfaction(package, liked_ef) / g
    best = total_preference(
        best_preference_package(ratings, group, len(tuple(package))), ratings, group
    )
    pref = total_preference(package, ratings, group) / best if best > 0 else 0.0
    return ScoreTriple(prop, ef, pref)
