"""Command-line surface.

Subcommands: enumerate, maximize, filter, topk, sample, balance, bench,
gen-groups.  Outputs are deterministic for a fixed seed and input; pick
``--format jsonlines`` for machine consumption.

Exit codes: 0 success, 1 usage error, 2 data error, 3 a package was
required but the family was empty.
"""

import json
import random
import sys

import click

from .balance import balance_search
from .bench import SWEEPS, BenchConfig, run_sweep
from .builder import build_fair_zdd
from .data import (
    DataError,
    GroupGenError,
    gen_group,
    load_ratings,
    read_groups,
    write_groups,
)
from .fairness import (
    group_preference_weights,
    liked_sets,
    max_fairness,
    rating_variance_weights,
)
from .zdd import ZddParseError, deserialize, serialize


class EmptyResultError(RuntimeError):
    """A package was required but the family has no members."""


def _echo(line=""):
    click.echo(line)


def _items_str(package):
    return " ".join(str(i) for i in package)


def _emit_summary(fmt, handle):
    if fmt == "jsonlines":
        _echo(json.dumps(
            {"count": handle.count(), "node_count": handle.node_count()},
            sort_keys=True,
        ))
    else:
        _echo("count,node_count")
        _echo(f"{handle.count()},{handle.node_count()}")


def _emit_package(fmt, package, value=None):
    if fmt == "jsonlines":
        obj = {"items": list(package)}
        if value is not None:
            obj["value"] = value
        _echo(json.dumps(obj, sort_keys=True))
    elif value is not None:
        _echo(f"{value!r},{_items_str(package)}")
    else:
        _echo(_items_str(package))


def _load_matrix(ratings, sep, impute, k_core):
    return load_ratings(ratings, sep=sep, impute=impute, k_core=k_core)


def _resolve_group(group, groups_file, group_index, n_users):
    if (group is None) == (groups_file is None):
        raise click.UsageError("specify exactly one of --group / --groups-file")
    if group is not None:
        try:
            members = [int(tok) for tok in group.split(",") if tok.strip()]
        except ValueError:
            raise click.UsageError(f"bad --group value {group!r}") from None
    else:
        groups = read_groups(groups_file)
        if not 0 <= group_index < len(groups):
            raise click.UsageError(
                f"--group-index {group_index} outside 0..{len(groups) - 1}"
            )
        members = groups[group_index]
    from .fairness import check_group

    return check_group(members, n_users)


def _parse_items(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise click.UsageError(f"bad item list {text!r}") from None


def _read_zdd(path):
    with open(path, "rb") as fh:
        return deserialize(fh.read())


def _load_weights(n, weights, weights_file, matrix, members):
    if weights_file is not None:
        table = [0.0] * n
        with open(weights_file, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise DataError(f"line {lineno}: expected '<item> <weight>'")
                try:
                    item = int(parts[0])
                    value = float(parts[1])
                except ValueError:
                    raise DataError(f"line {lineno}: bad weight row") from None
                if not 1 <= item <= n:
                    raise DataError(f"line {lineno}: item {item} outside 1..{n}")
                table[item - 1] = value
        return table
    if matrix is None or members is None:
        raise click.UsageError(
            "--weights pref/neg-variance needs --ratings and --group"
        )
    if weights == "pref":
        return group_preference_weights(matrix, members)
    return rating_variance_weights(matrix, members)


def ratings_options(required=True):
    return [
        click.option("--ratings", type=click.Path(exists=True, dir_okay=False),
                     required=required,
                     help="Ratings file (user, item, rating rows)."),
        click.option("--sep", default="::", show_default=True,
                     help="Field separator in the ratings file."),
        click.option("--impute", type=click.Choice(["zero", "user_mean"]),
                     default="zero", show_default=True,
                     help="Fill for never-observed matrix cells."),
        click.option("--k-core", default=0, show_default=True,
                     help="Drop users/items with fewer interactions, iteratively."),
    ]

group_options = [
    click.option("--group", default=None,
                 help="Comma-separated 1-based user indices."),
    click.option("--groups-file", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="File with one group per line."),
    click.option("--group-index", default=0, show_default=True,
                 help="Which line of --groups-file to use."),
]

format_option = click.option(
    "--format", "fmt", type=click.Choice(["csv", "jsonlines"]),
    default="csv", show_default=True, help="Output format."
)


def _add(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return wrap


@click.group()
@click.version_option(package_name="fape")
def cli():
    """Exact enumeration and filtering of fair packages for groups."""


@cli.command("enumerate")
@_add(ratings_options())
@_add(group_options)
@click.option("--k", "k_size", required=True, type=int, help="Package size.")
@click.option("--delta", default=5.0, show_default=True,
              help="Top share (percent) defining liked items.")
@click.option("--criterion", type=click.Choice(["prop", "ef"]), default="prop",
              show_default=True)
@click.option("--tau", default=0, show_default="group size",
              help="Fairness threshold (members to satisfy).")
@click.option("--m", default=1, show_default=True,
              help="Liked items required per satisfied member.")
@click.option("--limit", default=None, type=int,
              help="List at most this many packages.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the family to a ZDD file.")
@format_option
def enumerate_cmd(ratings, sep, impute, k_core, group, groups_file, group_index,
                  k_size, delta, criterion, tau, m, limit, out, fmt):
    """Build the family of all fair packages; print its size."""
    matrix = _load_matrix(ratings, sep, impute, k_core)
    members = _resolve_group(group, groups_file, group_index, matrix.n_users)
    liked = liked_sets(matrix, members, delta, criterion)
    handle = build_fair_zdd(liked, k_size, tau or len(members), m=m)
    _emit_summary(fmt, handle)
    if limit is not None:
        for package in handle.members(limit=limit):
            _emit_package(fmt, package)
    if out:
        with open(out, "wb") as fh:
            fh.write(serialize(handle))


@cli.command("maximize")
@_add(ratings_options())
@_add(group_options)
@click.option("--k", "k_size", required=True, type=int, help="Package size.")
@click.option("--delta", default=5.0, show_default=True)
@click.option("--criterion", type=click.Choice(["prop", "ef"]), default="prop",
              show_default=True)
@click.option("--m", default=1, show_default=True)
@format_option
def maximize_cmd(ratings, sep, impute, k_core, group, groups_file, group_index,
                 k_size, delta, criterion, m, fmt):
    """Best achievable fairness over all packages of the given size."""
    matrix = _load_matrix(ratings, sep, impute, k_core)
    members = _resolve_group(group, groups_file, group_index, matrix.n_users)
    liked = liked_sets(matrix, members, delta, criterion)
    value = max_fairness(liked, k_size, m=m)
    if fmt == "jsonlines":
        _echo(json.dumps({"max_fairness": value}))
    else:
        _echo("max_fairness")
        _echo(str(value))


@cli.command("filter")
@click.option("--in", "path_a", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Input ZDD file.")
@click.option("--op", type=click.Choice(
    ["union", "intersect", "difference", "superset", "exclude"]), required=True)
@click.option("--with", "path_b", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Second ZDD file (set operations).")
@click.option("--items", default=None,
              help="Comma-separated items (superset/exclude).")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the result to a ZDD file.")
@format_option
def filter_cmd(path_a, op, path_b, items, out, fmt):
    """Combine or restrict stored families."""
    handle = _read_zdd(path_a)
    if op in ("union", "intersect", "difference"):
        if path_b is None:
            raise click.UsageError(f"--op {op} needs --with")
        with open(path_b, "rb") as fh:
            other = deserialize(fh.read(), store=handle.store)
        result = handle.store.apply(op, handle, other)
    else:
        if items is None:
            raise click.UsageError(f"--op {op} needs --items")
        result = handle.restrict(_parse_items(items), op)
    _emit_summary(fmt, result)
    if out:
        with open(out, "wb") as fh:
            fh.write(serialize(result))


@cli.command("topk")
@click.option("--in", "path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Input ZDD file.")
@click.option("--k", "k_top", default=1, show_default=True,
              help="How many packages to report.")
@click.option("--weights", type=click.Choice(["pref", "neg-variance"]),
              default="pref", show_default=True)
@click.option("--weights-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Explicit '<item> <weight>' lines instead.")
@_add(ratings_options(required=False))
@_add(group_options)
@format_option
def topk_cmd(path, k_top, weights, weights_file, ratings, sep, impute, k_core,
             group, groups_file, group_index, fmt):
    """Highest-weight packages of a stored family, descending."""
    handle = _read_zdd(path)
    matrix = members = None
    if weights_file is None and ratings is not None:
        matrix = _load_matrix(ratings, sep, impute, k_core)
        members = _resolve_group(group, groups_file, group_index, matrix.n_users)
    table = _load_weights(handle.universe_size, weights, weights_file,
                          matrix, members)
    if handle.is_empty():
        raise EmptyResultError("the family is empty; nothing to rank")
    rows = handle.best_k(table, k_top)
    if fmt == "csv":
        _echo("value,items")
    for package, value in rows:
        _emit_package(fmt, package, value)


@cli.command("sample")
@click.option("--in", "path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Input ZDD file.")
@click.option("--count", default=1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--weighted", is_flag=True,
              help="Draw proportionally to item-weight sums.")
@click.option("--weights", type=click.Choice(["pref", "neg-variance"]),
              default="pref", show_default=True)
@click.option("--weights-file", type=click.Path(exists=True, dir_okay=False),
              default=None)
@_add(ratings_options(required=False))
@_add(group_options)
@format_option
def sample_cmd(path, count, seed, weighted, weights, weights_file, ratings,
               sep, impute, k_core, group, groups_file, group_index, fmt):
    """Draw packages from a stored family (uniform by default)."""
    handle = _read_zdd(path)
    if handle.is_empty():
        raise EmptyResultError("cannot sample from an empty family")
    table = None
    if weighted:
        matrix = members = None
        if weights_file is None and ratings is not None:
            matrix = _load_matrix(ratings, sep, impute, k_core)
            members = _resolve_group(group, groups_file, group_index,
                                     matrix.n_users)
        table = _load_weights(handle.universe_size, weights, weights_file,
                              matrix, members)
    sampler = handle.sampler(table)
    rng = random.Random(seed)
    if fmt == "csv":
        _echo("items")
    for _ in range(count):
        _emit_package(fmt, sampler.draw(rng))


@cli.command("balance")
@_add(ratings_options())
@_add(group_options)
@click.option("--k", "k_size", required=True, type=int, help="Package size.")
@click.option("--delta-prop", default=5.0, show_default=True,
              help="Liked-item share for proportionality.")
@click.option("--delta-ef", default=None, type=float,
              show_default="200/g percent (top 2 in group)",
              help="Liked-item share for envy-freeness.")
@format_option
def balance_cmd(ratings, sep, impute, k_core, group, groups_file, group_index,
                k_size, delta_prop, delta_ef, fmt):
    """Exactly optimal package for fairness plus preference, with the grid."""
    matrix = _load_matrix(ratings, sep, impute, k_core)
    members = _resolve_group(group, groups_file, group_index, matrix.n_users)
    if delta_ef is None:
        delta_ef = 200.0 / len(members)
    result = balance_search(matrix, members, k_size, delta_prop, delta_ef)
    if fmt == "jsonlines":
        _echo(json.dumps(result.as_dict(), sort_keys=True))
        return
    scores = result.scores
    _echo("items,prop_norm,ef_norm,pref_norm,total,tau,tau_prime,fallback")
    _echo(
        f"{_items_str(result.package)},{scores.prop_norm!r},{scores.ef_norm!r},"
        f"{scores.pref_norm!r},{scores.total!r},{result.tau},{result.tau_prime},"
        f"{'true' if result.fallback else 'false'}"
    )
    _echo("tau,tau_prime,count")
    for tau, row in enumerate(result.grid):
        for tau_p, count in enumerate(row):
            _echo(f"{tau},{tau_p},{count}")


@cli.command("bench")
@click.option("--sweep", type=click.Choice(SWEEPS), required=True)
@click.option("--values", required=True,
              help="Comma-separated sweep values.")
@click.option("--n-items", default=2000, show_default=True)
@click.option("--n-users", default=50, show_default=True)
@click.option("--k", "k_size", default=4, show_default=True)
@click.option("--g", default=8, show_default=True)
@click.option("--delta", default=5.0, show_default=True)
@click.option("--tau", default=0, show_default="group size")
@click.option("--criterion", type=click.Choice(["prop", "ef"]), default="prop",
              show_default=True)
@click.option("--grouping", type=click.Choice(["random", "similar", "divergent"]),
              default="random", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--backend", type=click.Choice(["auto", "c", "python"]),
              default="auto", show_default=True)
@click.option("--repeats", default=1, show_default=True,
              help="Timing repetitions per point (minimum wins).")
@format_option
def bench_cmd(sweep, values, n_items, n_users, k_size, g, delta, tau, criterion,
              grouping, seed, backend, repeats, fmt):
    """Synthetic scaling sweep; rows of value, seconds, counts."""
    if sweep == "grouping":
        parsed = [tok.strip() for tok in values.split(",") if tok.strip()]
    elif sweep == "delta":
        parsed = [float(tok) for tok in values.split(",") if tok.strip()]
    else:
        parsed = [int(tok) for tok in values.split(",") if tok.strip()]
    if not parsed:
        raise click.UsageError("--values must list at least one value")
    cfg = BenchConfig(
        n_items=n_items, n_users=n_users, k_size=k_size, g=g, delta=delta,
        tau=tau, criterion=criterion, grouping=grouping, seed=seed,
        backend=backend, repeats=repeats,
    )
    rows = run_sweep(sweep, parsed, cfg)
    if fmt == "csv":
        _echo("param,value,seconds,count,node_count")
        for row in rows:
            _echo(f"{row.param},{row.value},{row.seconds:.6f},"
                  f"{row.count},{row.node_count}")
    else:
        for row in rows:
            _echo(json.dumps({
                "param": row.param, "value": row.value,
                "seconds": round(row.seconds, 6), "count": row.count,
                "node_count": row.node_count,
            }, sort_keys=True))


@cli.command("gen-groups")
@_add(ratings_options())
@click.option("--strategy", type=click.Choice(["random", "similar", "divergent"]),
              default="random", show_default=True)
@click.option("--g", required=True, type=int, help="Group size.")
@click.option("--count", default=1, show_default=True, help="How many groups.")
@click.option("--seed", default=0, show_default=True)
@click.option("--c-sim", default=0.0, show_default=True,
              help="Minimum pairwise correlation (similar).")
@click.option("--c-div", default=0.0, show_default=True,
              help="Maximum nearest-member correlation (divergent).")
@click.option("--max-retries", default=50, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the groups to a file.")
def gen_groups_cmd(ratings, sep, impute, k_core, strategy, g, count, seed,
                   c_sim, c_div, max_retries, out):
    """Sample groups of users; one comma-separated group per line."""
    matrix = _load_matrix(ratings, sep, impute, k_core)
    groups = []
    for idx in range(count):
        groups.append(gen_group(
            matrix, g, strategy, seed=seed + idx,
            c_sim=c_sim, c_div=c_div, max_retries=max_retries,
        ))
    for members in groups:
        _echo(",".join(str(u) for u in members))
    if out:
        write_groups(out, groups)


def main(argv=None):
    """Run the CLI, mapping exception classes to documented exit codes."""
    try:
        cli.main(args=argv, prog_name="fape", standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (DataError, ZddParseError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except EmptyResultError as exc:
        click.echo(f"empty result: {exc}", err=True)
        return 3
    except (ValueError, GroupGenError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
