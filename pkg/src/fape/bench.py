"""Timing sweeps over synthetic instances.

Each sweep point generates a fresh synthetic rating matrix, samples a
group, derives the liked sets and times only the family construction
itself (the part whose scaling matters).  Package counts are exact
arbitrary-precision integers.
"""

import time
from dataclasses import dataclass

from .builder import build_fair_zdd
from .data import gen_group, synthetic_ratings
from .fairness import liked_sets
from .zdd import ZddStore

SWEEPS = ("n", "k", "g", "delta", "tau", "grouping")


@dataclass
class BenchRow:
    param: str
    value: object
    seconds: float
    count: int
    node_count: int


@dataclass
class BenchConfig:
    n_items: int = 2000
    n_users: int = 50
    k_size: int = 4
    g: int = 8
    delta: float = 5.0
    tau: int = 0  # 0 means "equal to the group size"
    m: int = 1
    criterion: str = "prop"
    grouping: str = "random"
    seed: int = 0
    backend: str = "auto"
    repeats: int = 1


def _apply_value(cfg, param, value):
    if param == "n":
        cfg.n_items = int(value)
    elif param == "k":
        cfg.k_size = int(value)
    elif param == "g":
        cfg.g = int(value)
    elif param == "delta":
        cfg.delta = float(value)
    elif param == "tau":
        cfg.tau = int(value)
    elif param == "grouping":
        cfg.grouping = str(value)
    else:
        raise ValueError(f"unknown sweep parameter {param!r}; expected {SWEEPS}")


def run_point(cfg):
    """(seconds, count, node_count) for one configuration."""
    if cfg.criterion in ("ef", "envy-freeness") and cfg.delta == 0:
        raise ValueError("delta must be positive")
    ratings = synthetic_ratings(cfg.n_users, cfg.n_items, cfg.seed)
    group = gen_group(ratings, cfg.g, cfg.grouping, seed=cfg.seed + 1)
    liked = liked_sets(ratings, group, cfg.delta, cfg.criterion)
    tau = cfg.tau if cfg.tau else cfg.g
    best = None
    handle = None
    for _ in range(max(1, cfg.repeats)):
        store = ZddStore(cfg.n_items)
        start = time.perf_counter()
        handle = build_fair_zdd(
            liked, cfg.k_size, tau, m=cfg.m, store=store, backend=cfg.backend
        )
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best, handle.count(), handle.node_count()


def run_sweep(param, values, cfg=None):
    """One :class:`BenchRow` per sweep value, varying ``param`` only."""
    if cfg is None:
        cfg = BenchConfig()
    rows = []
    for value in values:
        point = BenchConfig(**vars(cfg))
        _apply_value(point, param, value)
        seconds, count, nodes = run_point(point)
        rows.append(BenchRow(param, value, seconds, count, nodes))
    return rows
