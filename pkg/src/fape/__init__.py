"""Exact enumeration, filtering and sampling of fair packages for groups.

The core pieces: :mod:`fape.zdd` holds the shared decision-diagram store
and its family algebra; :mod:`fape.fairness` turns ratings into per-item
satisfied-member sets and scores; :mod:`fape.builder` constructs the family
of all sufficiently fair packages directly in reduced form;
:mod:`fape.balance` extracts the exactly optimal fairness/preference
trade-off; :mod:`fape.baselines` and :mod:`fape.data` supply comparison
methods and data handling; :mod:`fape.cli` wires it all up.
"""

from .backend import BACKEND, get_kernels
from .balance import BalanceResult, balance_search
from .baselines import METHODS, baseline_recommend
from .builder import (
    build_distinct_category,
    build_fair_zdd,
    build_same_category,
    pareto_frontier,
)
from .data import (
    DataError,
    GroupGenError,
    RatingMatrix,
    gen_group,
    load_ratings,
    pearson,
    read_groups,
    synthetic_ratings,
    write_groups,
)
from .fairness import (
    ENVY_FREENESS,
    PROPORTIONALITY,
    LikedSets,
    ScoreTriple,
    best_preference_package,
    group_preference_weights,
    liked_sets,
    max_fairness,
    rating_variance_weights,
    satisfaction,
    score_triple,
    total_preference,
)
from .zdd import (
    BOTTOM,
    TOP,
    PackageSampler,
    ZddHandle,
    ZddParseError,
    ZddStore,
    deserialize,
    serialize,
    verify_structure,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BOTTOM",
    "BalanceResult",
    "DataError",
    "ENVY_FREENESS",
    "GroupGenError",
    "LikedSets",
    "METHODS",
    "PROPORTIONALITY",
    "PackageSampler",
    "RatingMatrix",
    "ScoreTriple",
    "TOP",
    "ZddHandle",
    "ZddParseError",
    "ZddStore",
    "balance_search",
    "baseline_recommend",
    "best_preference_package",
    "build_distinct_category",
    "build_fair_zdd",
    "build_same_category",
    "deserialize",
    "gen_group",
    "get_kernels",
    "group_preference_weights",
    "liked_sets",
    "load_ratings",
    "max_fairness",
    "pareto_frontier",
    "pearson",
    "rating_variance_weights",
    "read_groups",
    "satisfaction",
    "score_triple",
    "serialize",
    "synthetic_ratings",
    "total_preference",
    "verify_structure",
    "write_groups",
]
