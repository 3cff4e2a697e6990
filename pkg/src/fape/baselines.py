"""Single-package comparison recommenders.

Two ranking methods score items independently and take the top ``k``; the
greedy methods grow the package one item at a time by a marginal objective.
Everything is deterministic: score ties always fall to the smaller item
index (greedy coverage ties prefer the higher group rating sum first).
"""

import numpy as np

from .fairness import check_group, matrix_values, satisfaction

METHODS = (
    "ave_ranking",
    "lm_ranking",
    "greedy_var",
    "greedy_lm",
    "gfar",
    "sp_greedy",
    "ef_greedy",
)


def baseline_recommend(
    method, ratings, group, k_size, liked_prop=None, liked_ef=None, lam=0.5
):
    """One ``k_size``-item package from the named method.

    ``liked_prop``/``liked_ef`` are required by the coverage-greedy methods
    ``sp_greedy`` and ``ef_greedy``.  ``lam`` balances preference against
    the fairness term in ``greedy_var``/``greedy_lm``.
    """
    arr = matrix_values(ratings)
    members = check_group(group, arr.shape[0])
    n = arr.shape[1]
    if not 1 <= k_size <= n:
        raise ValueError(f"package size must be in 1..{n}")
    if not 0 <= lam <= 1:
        raise ValueError("lam must lie in [0, 1]")
    sub = arr[[u - 1 for u in members]]

    if method == "ave_ranking":
        return _rank_top(sub.sum(axis=0), k_size)
    if method == "lm_ranking":
        return _rank_top(sub.min(axis=0), k_size)
    if method == "greedy_var":
        return _greedy_balanced(sub, k_size, lam, fair="variance")
    if method == "greedy_lm":
        return _greedy_balanced(sub, k_size, lam, fair="least_misery")
    if method == "gfar":
        return _greedy_gfar(sub, k_size)
    if method == "sp_greedy":
        if liked_prop is None:
            raise ValueError("sp_greedy needs the proportionality liked sets")
        return _greedy_coverage(sub, liked_prop, k_size)
    if method == "ef_greedy":
        if liked_ef is None:
            raise ValueError("ef_greedy needs the envy-freeness liked sets")
        return _greedy_coverage(sub, liked_ef, k_size)
    raise ValueError(f"unknown baseline method {method!r}; expected one of {METHODS}")


def _rank_top(scores, k_size):
    order = np.argsort(-np.asarray(scores, dtype=float), kind="stable")[:k_size]
    return tuple(sorted(int(i) + 1 for i in order))


def _greedy(n, k_size, gain):
    """Generic greedy loop; ``gain`` returns a comparable score tuple."""
    chosen = []
    in_pkg = [False] * (n + 1)
    for _ in range(k_size):
        best_item = 0
        best_score = None
        for item in range(1, n + 1):
            if in_pkg[item]:
                continue
            score = gain(item, chosen)
            if best_score is None or score > best_score:
                best_score = score
                best_item = item
        chosen.append(best_item)
        in_pkg[best_item] = True
    return tuple(sorted(chosen))


def _greedy_balanced(sub, k_size, lam, fair):
    # per-user utilities are means of min-max normalized ratings, so both
    # objective terms live on the same [0, 1] scale
    lows = sub.min(axis=1, keepdims=True)
    spans = sub.max(axis=1, keepdims=True) - lows
    norm = np.divide(sub - lows, spans, out=np.zeros_like(sub), where=spans > 0)

    def gain(item, chosen):
        cols = [i - 1 for i in chosen] + [item - 1]
        utils = norm[:, cols].mean(axis=1)
        rel = float(utils.mean())
        if fair == "variance":
            fairness = 1.0 - float(utils.var())
        else:
            fairness = float(utils.min())
        return (lam * rel + (1 - lam) * fairness, -item)

    return _greedy(sub.shape[1], k_size, gain)


def _greedy_gfar(sub, k_size):
    # Borda relevance normalized into a per-user probability over items;
    # the objective sums, per user, the chance that some package item is
    # relevant, which gives diminishing returns on already-covered users
    g, n = sub.shape
    borda = np.empty_like(sub)
    for row in range(g):
        order = np.argsort(-sub[row], kind="stable")
        ranks = np.empty(n, dtype=float)
        ranks[order] = np.arange(1, n + 1)
        borda[row] = (n - ranks + 1) / (n * (n + 1) / 2)

    def gain(item, chosen):
        cols = [i - 1 for i in chosen] + [item - 1]
        miss = np.prod(1.0 - borda[:, cols], axis=1)
        return (float((1.0 - miss).sum()), -item)

    return _greedy(n, k_size, gain)


def _greedy_coverage(sub, liked, k_size):
    if liked.n != sub.shape[1]:
        raise ValueError("liked sets must cover the same items as the ratings")
    sums = sub.sum(axis=0)

    def gain(item, chosen):
        covered = 0
        for it in chosen:
            covered |= liked.masks[it - 1]
        fresh = liked.masks[item - 1] & ~covered
        return (bin(fresh).count("1"), float(sums[item - 1]), -item)

    return _greedy(sub.shape[1], k_size, gain)


def baseline_scores(ratings, group, k_size, liked_prop, liked_ef, lam=0.5):
    """Package and fairness pair for every method, keyed by method name."""
    out = {}
    for method in METHODS:
        package = baseline_recommend(
            method, ratings, group, k_size, liked_prop, liked_ef, lam
        )
        out[method] = (
            package,
            satisfaction(package, liked_prop),
            satisfaction(package, liked_ef),
        )
    return out
