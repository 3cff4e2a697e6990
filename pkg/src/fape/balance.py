"""Exactly optimal balancing of both fairness criteria and preference.

The total score of a package is proportionality/g + envy-freeness/g +
normalized preference.  Sweeping a grid over both fairness thresholds,
intersecting the corresponding families and pulling each cell's
maximum-preference package yields a candidate set that provably contains a
total-score optimum: any package lands in the grid cell indexed by its own
two satisfaction values (0 included), and that cell's champion weakly
dominates it on all three terms.
"""

from dataclasses import dataclass

from .builder import build_fair_zdd
from .fairness import (
    ScoreTriple,
    check_group,
    group_preference_weights,
    liked_sets,
    matrix_values,
    satisfaction,
)
from .zdd import ZddStore


@dataclass
class BalanceResult:
    """Winner of the balanced search plus the full threshold grid."""

    package: tuple
    scores: ScoreTriple
    tau: int
    tau_prime: int
    grid: list  # grid[tau][tau_prime] = exact package count, 0..g each axis
    fallback: bool  # no package cleared either criterion at threshold 1

    def as_dict(self):
        return {
            "items": list(self.package),
            "scores": self.scores.as_dict(),
            "tau": self.tau,
            "tau_prime": self.tau_prime,
            "fallback": self.fallback,
            "grid": self.grid,
        }


def balance_search(
    ratings, group, k_size, delta_prop, delta_ef, store=None, backend=None
):
    """Find the package with the maximum total score, exactly.

    Builds one family per proportionality threshold and one per
    envy-freeness threshold (threshold 0 meaning "unconstrained"), scores
    every nonempty intersection's preference champion, and returns the best.
    """
    arr = matrix_values(ratings)
    members = check_group(group, arr.shape[0])
    g = len(members)
    n = arr.shape[1]
    if not 1 <= k_size <= n:
        raise ValueError(f"package size must be in 1..{n}")
    liked_prop = liked_sets(arr, members, delta_prop, "prop")
    liked_ef = liked_sets(arr, members, delta_ef, "ef")
    if store is None:
        store = ZddStore(n)
    weights = group_preference_weights(arr, members)
    everything = store.all_k_subsets(k_size)
    prop_fams = [everything] + [
        build_fair_zdd(liked_prop, k_size, t, store=store, backend=backend)
        for t in range(1, g + 1)
    ]
    ef_fams = [everything] + [
        build_fair_zdd(liked_ef, k_size, t, store=store, backend=backend)
        for t in range(1, g + 1)
    ]
    best_pref = everything.best_k(weights, 1)[0][1] if not everything.is_empty() else 0.0

    grid = [[0] * (g + 1) for _ in range(g + 1)]
    best = None
    for tau in range(g + 1):
        if prop_fams[tau].is_empty():
            continue
        for tau_p in range(g + 1):
            cell = prop_fams[tau].intersect(ef_fams[tau_p])
            grid[tau][tau_p] = cell.count()
            if cell.is_empty():
                continue
            package, pref = cell.best_k(weights, 1)[0]
            scores = ScoreTriple(
                satisfaction(package, liked_prop) / g,
                satisfaction(package, liked_ef) / g,
                pref / best_pref if best_pref > 0 else 0.0,
            )
            if best is None or scores.total > best[1].total:
                best = (package, scores, tau, tau_p)
    if best is None:
        raise ValueError("no package of the requested size exists")
    fallback = prop_fams[1].is_empty() and ef_fams[1].is_empty()
    package, scores, tau, tau_p = best
    return BalanceResult(package, scores, tau, tau_p, grid, fallback)
