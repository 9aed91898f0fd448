"""Command-line front end.

Subcommands map onto the library one-to-one: `graph` emits topologies as
edge lists, `alpha` prints attention centrality, `pool` runs a one-shot
communication round on an explicit forecast vector, `analytic` evaluates
the closed forms, and `simulate` / `sweep` drive the Monte Carlo
runners from a JSON config.

Exit codes: 0 success, 2 usage or configuration error, 1 runtime error
(I/O and the like). A master seed can come from --seed, the config file,
or the NETPOOL_SEED environment variable, in that order of precedence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .asymptotics import (
    AsymptoticParams,
    EULER_GAMMA,
    exponential_integral,
    expected_bias_variance_poisson,
    k_factor,
)
from .bias import (
    alpha_csv_string,
    attention_centrality,
    dm_posterior_precision,
    line_bias_variance,
    network_bias,
    star_bias_variance,
)
from .covariance import CovarianceSpec, Equicorrelated, Heterogeneous
from .experiments import (
    ConfigError,
    load_config,
    results_csv_string,
    run_fixed_graph,
    run_random_graph,
    with_master_seed,
    write_results,
)
from .graphs import (
    DegreeParams,
    Graph,
    edge_list_string,
    make_d_regular,
    make_line,
    make_star,
    read_edge_list,
    sample_poisson_graph,
    write_edge_list,
)
from .pooling import (
    bayes_pool_dm,
    broadcast_rules,
    combined_forecasts,
    combine_combined,
    simple_average_dm,
)

__all__ = ["main", "entrypoint"]

SEED_ENV = "NETPOOL_SEED"


def _resolve_seed(explicit, required: bool):
    """--seed wins; NETPOOL_SEED is the fallback; error only if required."""
    if explicit is not None:
        return explicit
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        if required:
            raise ConfigError(f"a master seed is required (--seed or {SEED_ENV})")
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _graph_from_args(args) -> Graph:
    if getattr(args, "edges", None) is not None and args.topology is not None:
        raise ConfigError("give either --edges or --topology, not both")
    if getattr(args, "edges", None) is not None:
        try:
            return read_edge_list(args.edges)
        except RuntimeError as exc:
            # unreadable input is a usage problem, not a runtime failure
            raise ConfigError(str(exc)) from exc
    if args.topology is None:
        raise ConfigError("a graph is required: --topology or --edges")
    kind, n = args.topology, args.n
    if n is None:
        raise ConfigError("--n is required with --topology")
    if kind == "star":
        return make_star(n)
    if kind == "line":
        return make_line(n)
    if kind == "ring":
        return make_d_regular(n, 2)
    if kind == "complete":
        return make_d_regular(n, n - 1)
    if kind == "d_regular":
        if args.d is None:
            raise ConfigError("--d is required with --topology d_regular")
        return make_d_regular(n, args.d)
    if kind == "poisson":
        if args.mean_degree is None:
            raise ConfigError("--mean-degree is required with --topology poisson")
        if n < 2:
            raise ConfigError("--topology poisson needs --n >= 2")
        p = args.mean_degree / (n - 1)
        if p > 1.0:
            raise ConfigError(
                f"--mean-degree {args.mean_degree} needs n > {args.mean_degree + 1}"
            )
        seed = _resolve_seed(args.seed, required=True)
        return sample_poisson_graph(DegreeParams(n=n, p=p), seed)
    raise ConfigError(f"unknown topology {kind!r}")


def _cov_from_args(args, n: int) -> CovarianceSpec:
    if getattr(args, "sigmas", None):
        sigmas = tuple(float(s) for s in args.sigmas.split(","))
        if len(sigmas) != n:
            raise ConfigError(f"--sigmas has {len(sigmas)} entries, graph has n={n}")
        return Heterogeneous(sigmas=sigmas, rho=args.rho)
    return Equicorrelated(n=n, sigma2=args.sigma2, rho=args.rho)


def _parse_x(args, n: int) -> np.ndarray:
    if args.x is not None and args.x_file is not None:
        raise ConfigError("give either --x or --x-file, not both")
    if args.x is not None:
        values = [float(v) for v in args.x.split(",")]
    elif args.x_file is not None:
        try:
            with open(args.x_file) as fh:
                values = [float(ln) for ln in fh if ln.strip()]
        except OSError as exc:
            raise ConfigError(f"cannot read {args.x_file}: {exc}") from exc
    else:
        raise ConfigError("a forecast vector is required: --x or --x-file")
    if len(values) != n:
        raise ConfigError(f"forecast vector has {len(values)} entries, graph has n={n}")
    return np.asarray(values, dtype=np.float64)


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    try:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise RuntimeError(f"cannot write {out_path}: {exc}") from exc


def _json_value(value: float):
    # NaN is not valid JSON; emit null instead.
    return None if isinstance(value, float) and not math.isfinite(value) else value


def _g6(value: float) -> str:
    return "%.6g" % value


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_graph(args) -> int:
    graph = _graph_from_args(args)
    if args.out is not None:
        write_edge_list(graph, args.out)
    else:
        sys.stdout.write(edge_list_string(graph))
    return 0


def _cmd_alpha(args) -> int:
    graph = _graph_from_args(args)
    alphas = attention_centrality(graph)
    fmt = args.format or ("csv" if args.out else "table")
    if fmt == "csv":
        text = alpha_csv_string(alphas)
    elif fmt == "json":
        rows = [{"node": i + 1, "alpha": _json_value(float(a))} for i, a in enumerate(alphas)]
        text = json.dumps(rows, indent=2) + "\n"
    else:
        lines = ["node  alpha"]
        lines += [f"{i + 1:>4}  {_g6(a)}" for i, a in enumerate(alphas)]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def _cmd_pool(args) -> int:
    graph = _graph_from_args(args)
    n = graph.n
    x = _parse_x(args, n)
    rules = broadcast_rules(args.rules, n)
    spec = _cov_from_args(args, n)
    combined = combined_forecasts(graph, x, spec, rules)
    pooled = combine_combined(graph, x, spec, rules)
    if rules.dm_rule == "S":
        direct = simple_average_dm(x)
    else:
        direct = bayes_pool_dm(x, spec)[0]
    bias = network_bias(graph, x, spec, rules)
    fmt = args.format or ("csv" if args.out else "table")
    if fmt == "csv":
        lines = ["quantity,value"]
        lines += [f"combined_{i + 1},{float(v)!r}" for i, v in enumerate(combined)]
        lines += [
            f"pooled_combined,{float(pooled)!r}",
            f"pooled_direct,{float(direct)!r}",
            f"bias,{float(bias)!r}",
        ]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = {
            "rules": args.rules,
            "combined": [_json_value(float(v)) for v in combined],
            "pooled_combined": _json_value(float(pooled)),
            "pooled_direct": _json_value(float(direct)),
            "bias": _json_value(float(bias)),
        }
        if args.theta is not None:
            payload["theta"] = args.theta
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = []
        if args.theta is not None:
            lines.append(f"theta            {_g6(args.theta)}")
        lines.append("combined         " + ", ".join(_g6(v) for v in combined))
        lines.append(f"pooled combined  {_g6(pooled)}")
        lines.append(f"pooled direct    {_g6(direct)}")
        lines.append(f"bias             {_g6(bias)}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


_ANALYTIC_KINDS = ("star-var", "line-var", "k", "ei", "poisson-var", "dm-precision")


def _cmd_analytic(args) -> int:
    kind = args.quantity
    if kind in ("star-var", "line-var", "poisson-var", "dm-precision") and args.n is None:
        raise ConfigError(f"analytic {kind} requires --n")
    if kind == "star-var":
        value = star_bias_variance(args.n, args.sigma2, args.rho)
    elif kind == "line-var":
        value = line_bias_variance(args.n, args.sigma2, args.rho)
    elif kind == "k":
        if args.lam is None:
            raise ConfigError("analytic k requires --lam")
        value = k_factor(args.lam)
    elif kind == "ei":
        if args.x is None:
            raise ConfigError("analytic ei requires --x")
        value = exponential_integral(args.x)
    elif kind == "poisson-var":
        if args.mean_degree is None:
            raise ConfigError("analytic poisson-var requires --mean-degree")
        value = expected_bias_variance_poisson(
            AsymptoticParams(n=args.n, sigma2=args.sigma2, mean_degree=args.mean_degree)
        )
    elif kind == "dm-precision":
        value = dm_posterior_precision(args.n, args.sigma2, args.rho)
    else:
        raise ConfigError(f"unknown analytic quantity {kind!r}")
    fmt = args.format or ("csv" if args.out else "table")
    if fmt == "csv":
        text = f"quantity,value\n{kind},{float(value)!r}\n"
    elif fmt == "json":
        text = json.dumps({"quantity": kind, "value": _json_value(float(value))}) + "\n"
    else:
        text = f"{kind}  {_g6(value)}\n"
    _emit(text, args.out)
    return 0


def _sweep_table(result) -> str:
    header = ("n", "mean_bias", "var_bias", "se_mean", "se_var",
              "analytic_var", "replicates_used", "seed_base")
    table = [header]
    for row in result.rows:
        table.append((
            str(row.n), _g6(row.mean_bias), _g6(row.var_bias), _g6(row.se_mean),
            _g6(row.se_var), _g6(row.analytic_var), str(row.replicates_used),
            str(row.seed_base),
        ))
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    lines = ["  ".join(cell.rjust(widths[c]) for c, cell in enumerate(row)) for row in table]
    return "\n".join(lines) + "\n"


def _run_experiment(args, runner) -> int:
    config = load_config(args.config)
    seed = _resolve_seed(args.seed, required=False)
    if seed is not None:
        config = with_master_seed(config, seed)
    result = runner(config, threads=args.threads)
    fmt = args.format or ("csv" if args.out else "table")
    if fmt == "csv":
        if args.out is not None:
            write_results(result, args.out)
        else:
            sys.stdout.write(results_csv_string(result))
        return 0
    if fmt == "json":
        rows = []
        for row in result.rows:
            d = {field: getattr(row, field) for field in (
                "n", "mean_bias", "var_bias", "se_mean", "se_var",
                "analytic_var", "replicates_used", "seed_base")}
            rows.append({k: _json_value(v) for k, v in d.items()})
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
        return 0
    _emit(_sweep_table(result), args.out)
    return 0


def _cmd_simulate(args) -> int:
    return _run_experiment(args, run_fixed_graph)


def _cmd_sweep(args) -> int:
    return _run_experiment(args, run_random_graph)


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def _add_graph_source(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--topology",
                     choices=("star", "line", "ring", "complete", "d_regular", "poisson"),
                     help="built-in topology family")
    sub.add_argument("--n", type=int, help="number of experts")
    sub.add_argument("--d", type=int, help="degree for --topology d_regular")
    sub.add_argument("--mean-degree", type=float, dest="mean_degree",
                     help="expected degree for --topology poisson")
    sub.add_argument("--edges", help="edge-list file (n=<int> header, one 'i j' pair per line)")
    sub.add_argument("--seed", type=int, help=f"master seed (fallback: {SEED_ENV})")


def _add_output(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="write output to this path instead of stdout")
    sub.add_argument("--format", choices=("csv", "json", "table"),
                     help="output format (default: table on stdout, csv with --out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netpool",
        description="Forecast pooling on expert networks: generators, "
                    "centrality, closed forms, and Monte Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_graph = sub.add_parser("graph", help="emit a topology as an edge list")
    _add_graph_source(p_graph)
    p_graph.add_argument("--out", help="write edge list to this path instead of stdout")
    p_graph.set_defaults(func=_cmd_graph)

    p_alpha = sub.add_parser("alpha", help="attention centrality of a graph")
    _add_graph_source(p_alpha)
    _add_output(p_alpha)
    p_alpha.set_defaults(func=_cmd_alpha)

    p_pool = sub.add_parser("pool", help="one communication round on an explicit forecast vector")
    _add_graph_source(p_pool)
    p_pool.add_argument("--x", help="comma-separated forecasts, e.g. 1,5,3")
    p_pool.add_argument("--x-file", dest="x_file", help="file with one forecast per line")
    p_pool.add_argument("--rules", default="S|S",
                        help="rule assignment 'DM|experts', e.g. S|SSB (default S|S)")
    p_pool.add_argument("--theta", type=float, help="true value, echoed for context")
    p_pool.add_argument("--sigma2", type=float, default=1.0,
                        help="common error variance (default 1)")
    p_pool.add_argument("--rho", type=float, default=0.0,
                        help="common error correlation (default 0)")
    p_pool.add_argument("--sigmas", help="comma-separated per-expert std devs")
    _add_output(p_pool)
    p_pool.set_defaults(func=_cmd_pool)

    p_analytic = sub.add_parser("analytic", help="closed-form quantities")
    p_analytic.add_argument("quantity", choices=_ANALYTIC_KINDS)
    p_analytic.add_argument("--n", type=int, help="number of experts")
    p_analytic.add_argument("--sigma2", type=float, default=1.0)
    p_analytic.add_argument("--rho", type=float, default=0.0)
    p_analytic.add_argument("--lam", type=float, help="mean degree for k")
    p_analytic.add_argument("--x", type=float, help="argument for ei")
    p_analytic.add_argument("--mean-degree", type=float, dest="mean_degree",
                            help="expected degree for poisson-var")
    _add_output(p_analytic)
    p_analytic.set_defaults(func=_cmd_analytic)

    for name, help_text, body in (
        ("simulate", "fixed-topology Monte Carlo run from a JSON config", _cmd_simulate),
        ("sweep", "Poisson random-graph sweep from a JSON config", _cmd_sweep),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, help=f"override master_seed (fallback: {SEED_ENV})")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads; results do not depend on this")
        _add_output(p)
        p.set_defaults(func=body)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main(sys.argv[1:]))
