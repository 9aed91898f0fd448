"""Reproducible Monte Carlo harness for network-bias experiments.

Two regimes. Fixed-graph runs hold one deterministic topology per n and
replicate error draws to compare the sample bias variance with its
closed-form prediction. Random-graph sweeps sample Poisson graphs at
p = <d>/(n-1) and pool bias draws over two replication levels (graphs x
draws), the regime behind the expected-variance asymptotics.

Every work unit draws from its own stream, seeded by a stable hash of
(master_seed, n, graph index, replicate index). Results are therefore
identical at any thread count, and output CSVs are byte-stable.
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .asymptotics import AsymptoticParams, expected_bias_variance_poisson
from .bias import attention_centrality, bias_variance_from_alpha, bias_weights
from .covariance import CovarianceSpec, Equicorrelated, GeneralCovariance, Heterogeneous, sample_errors
from .graphs import DegreeParams, Graph, make_d_regular, make_line, make_star, sample_poisson_graph
from .pooling import broadcast_rules, parse_rule_assignment
from .seeding import derive_seed

__all__ = [
    "ConfigError",
    "CovConfig",
    "TopologyConfig",
    "ExperimentConfig",
    "SweepRow",
    "SweepResult",
    "config_from_dict",
    "load_config",
    "build_topology",
    "run_fixed_graph",
    "run_random_graph",
    "results_csv_string",
    "write_results",
    "read_results",
]

FIXED_TOPOLOGIES = ("star", "line", "ring", "d_regular", "complete")
CSV_HEADER = "n,mean_bias,var_bias,se_mean,se_var,analytic_var,replicates_used,seed_base"


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending key."""


@dataclass(frozen=True)
class CovConfig:
    """Covariance family plus parameters; instantiated per n during a sweep."""

    kind: str
    sigma2: float = None
    rho: float = 0.0
    sigmas: tuple = None
    matrix: np.ndarray = None

    def spec_for(self, n: int) -> CovarianceSpec:
        try:
            if self.kind == "equi":
                return Equicorrelated(n=n, sigma2=self.sigma2, rho=self.rho)
            if self.kind == "hetero":
                if len(self.sigmas) != n:
                    raise ConfigError(
                        f"cov.sigmas has length {len(self.sigmas)}, but n={n} was requested"
                    )
                return Heterogeneous(sigmas=self.sigmas, rho=self.rho)
            if self.kind == "general":
                if self.matrix.shape[0] != n:
                    raise ConfigError(
                        f"cov.matrix is {self.matrix.shape[0]}x{self.matrix.shape[1]}, "
                        f"but n={n} was requested"
                    )
                return GeneralCovariance(matrix=self.matrix)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"cov: {exc}") from exc
        raise ConfigError(f"cov.kind must be one of equi, hetero, general; got {self.kind!r}")


@dataclass(frozen=True)
class TopologyConfig:
    kind: str
    d: int = None
    mean_degree: float = None


@dataclass(frozen=True)
class ExperimentConfig:
    theta: float
    cov: CovConfig
    topology: TopologyConfig
    n_values: tuple
    replicates: int = 500
    graph_replicates: int = 200
    rules: str = "S|S"
    master_seed: int = None

    def __post_init__(self):
        if not self.n_values:
            raise ConfigError("n_values must be nonempty")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.graph_replicates < 1:
            raise ConfigError(f"graph_replicates must be >= 1, got {self.graph_replicates}")


def _require(mapping: dict, key: str, context: str = ""):
    label = f"{context}{key}"
    if key not in mapping:
        raise ConfigError(f"missing required config key: {label}")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed, context: str = "") -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown config key: {context}{key}")


def _cov_from_dict(raw: dict) -> CovConfig:
    if not isinstance(raw, dict):
        raise ConfigError("cov must be an object with a 'kind' field")
    kind = _require(raw, "kind", "cov.")
    if kind == "equi":
        _reject_unknown(raw, {"kind", "sigma2", "rho"}, "cov.")
        return CovConfig(kind="equi", sigma2=float(_require(raw, "sigma2", "cov.")),
                         rho=float(raw.get("rho", 0.0)))
    if kind == "hetero":
        _reject_unknown(raw, {"kind", "sigmas", "rho"}, "cov.")
        sigmas = tuple(float(s) for s in _require(raw, "sigmas", "cov."))
        return CovConfig(kind="hetero", sigmas=sigmas, rho=float(raw.get("rho", 0.0)))
    if kind == "general":
        _reject_unknown(raw, {"kind", "matrix"}, "cov.")
        matrix = np.asarray(_require(raw, "matrix", "cov."), dtype=np.float64)
        return CovConfig(kind="general", matrix=matrix)
    raise ConfigError(f"cov.kind must be one of equi, hetero, general; got {kind!r}")


def _topology_from_dict(raw: dict) -> TopologyConfig:
    if not isinstance(raw, dict):
        raise ConfigError("topology must be an object with a 'kind' field")
    kind = _require(raw, "kind", "topology.")
    if kind in ("star", "line", "ring", "complete"):
        _reject_unknown(raw, {"kind"}, "topology.")
        return TopologyConfig(kind=kind)
    if kind == "d_regular":
        _reject_unknown(raw, {"kind", "d"}, "topology.")
        return TopologyConfig(kind=kind, d=int(_require(raw, "d", "topology.")))
    if kind == "poisson":
        _reject_unknown(raw, {"kind", "mean_degree"}, "topology.")
        mean_degree = float(_require(raw, "mean_degree", "topology."))
        if mean_degree <= 0.0:
            raise ConfigError(f"topology.mean_degree must be positive, got {mean_degree}")
        return TopologyConfig(kind=kind, mean_degree=mean_degree)
    raise ConfigError(
        f"topology.kind must be one of {FIXED_TOPOLOGIES + ('poisson',)}, got {kind!r}"
    )


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    allowed = {"theta", "cov", "topology", "n_values", "replicates",
               "graph_replicates", "rules", "master_seed"}
    _reject_unknown(raw, allowed)
    theta = float(_require(raw, "theta"))
    cov = _cov_from_dict(_require(raw, "cov"))
    topology = _topology_from_dict(_require(raw, "topology"))
    n_values = _require(raw, "n_values")
    if not isinstance(n_values, (list, tuple)) or not n_values:
        raise ConfigError("n_values must be a nonempty list of integers")
    cleaned = []
    for value in n_values:
        if int(value) != value or int(value) < 1:
            raise ConfigError(f"n_values entries must be positive integers, got {value!r}")
        cleaned.append(int(value))
    rules = raw.get("rules", "S|S")
    try:
        parse_rule_assignment(rules)
    except ValueError as exc:
        raise ConfigError(f"rules: {exc}") from exc
    master_seed = raw.get("master_seed")
    if master_seed is not None:
        if int(master_seed) != master_seed:
            raise ConfigError(f"master_seed must be an integer, got {master_seed!r}")
        master_seed = int(master_seed)
    return ExperimentConfig(
        theta=theta,
        cov=cov,
        topology=topology,
        n_values=tuple(cleaned),
        replicates=int(raw.get("replicates", 500)),
        graph_replicates=int(raw.get("graph_replicates", 200)),
        rules=rules,
        master_seed=master_seed,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def with_master_seed(config: ExperimentConfig, master_seed: int) -> ExperimentConfig:
    return dataclasses.replace(config, master_seed=master_seed)


def build_topology(topology: TopologyConfig, n: int) -> Graph:
    """Materialize a deterministic topology at size n."""
    kind = topology.kind
    if kind == "star":
        return make_star(n)
    if kind == "line":
        return make_line(n)
    if kind == "ring":
        return make_d_regular(n, 2)
    if kind == "complete":
        return make_d_regular(n, n - 1)
    if kind == "d_regular":
        return make_d_regular(n, topology.d)
    raise ConfigError(f"topology.kind {kind!r} is not a fixed topology")


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    n: int
    mean_bias: float
    var_bias: float
    se_mean: float
    se_var: float
    analytic_var: float
    replicates_used: int
    seed_base: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))


def _require_master_seed(config: ExperimentConfig) -> int:
    if config.master_seed is None:
        raise ConfigError("master_seed is not set (config key, --seed, or NETPOOL_SEED)")
    return config.master_seed


def _fill_biases(out: np.ndarray, weights: np.ndarray, spec, theta: float,
                 master_seed: int, n: int, graph_index: int, lo: int, hi: int) -> None:
    # Each replicate writes only its own slot, so chunk boundaries and
    # thread scheduling cannot change the result.
    for r in range(lo, hi):
        eps = sample_errors(spec, derive_seed(master_seed, n, graph_index, r))
        out[r] = weights @ (theta + eps)


def _run_units(tasks, threads: int) -> None:
    if threads <= 1:
        for task in tasks:
            task()
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(task) for task in tasks]
        for fut in futures:
            fut.result()


def _summary_row(n: int, biases: np.ndarray, analytic: float, seed_base: int,
                 fixed_graph: bool) -> SweepRow:
    used = biases.size
    mean = float(np.mean(biases))
    if used > 1:
        var = float(np.var(biases, ddof=1))
        se_mean = math.sqrt(var / used)
        if fixed_graph:
            se_var = analytic * math.sqrt(2.0 / (used - 1)) if math.isfinite(analytic) else math.nan
        else:
            se_var = var * math.sqrt(2.0 / (used - 1))
    else:
        var, se_mean, se_var = 0.0, math.nan, math.nan
    return SweepRow(n=n, mean_bias=mean, var_bias=var, se_mean=se_mean, se_var=se_var,
                    analytic_var=analytic, replicates_used=used, seed_base=seed_base)


def run_fixed_graph(config: ExperimentConfig, threads: int = 1) -> SweepResult:
    """Bias distribution on one deterministic topology per n.

    Per n: build the graph once, draw `replicates` forecast vectors with
    per-replicate seeds, record the network bias of each, and report the
    sample mean/variance next to the closed-form variance prediction
    (defined for the equicorrelated family; nan otherwise).
    """
    if config.topology.kind not in FIXED_TOPOLOGIES:
        raise ConfigError(
            f"topology.kind {config.topology.kind!r} is not deterministic; use run_random_graph"
        )
    master_seed = _require_master_seed(config)
    rows = []
    for n in config.n_values:
        graph = build_topology(config.topology, n)
        spec = config.cov.spec_for(n)
        try:
            rules = broadcast_rules(config.rules, n)
        except ValueError as exc:
            raise ConfigError(f"rules: {exc}") from exc
        weights = bias_weights(graph, spec, rules)
        if config.cov.kind == "equi":
            analytic = bias_variance_from_alpha(attention_centrality(graph),
                                                config.cov.sigma2, config.cov.rho)
        else:
            analytic = math.nan
        reps = config.replicates
        biases = np.empty(reps)
        chunk = 4096
        tasks = [
            (lambda lo=lo: _fill_biases(biases, weights, spec, config.theta,
                                        master_seed, n, 0, lo, min(lo + chunk, reps)))
            for lo in range(0, reps, chunk)
        ]
        _run_units(tasks, threads)
        rows.append(_summary_row(n, biases, analytic, derive_seed(master_seed, n), True))
    return SweepResult(rows=rows)


def run_random_graph(config: ExperimentConfig, threads: int = 1) -> SweepResult:
    """Two-level Poisson sweep: sampled graphs x error draws, pooled per n."""
    if config.topology.kind != "poisson":
        raise ConfigError("run_random_graph requires topology.kind = poisson")
    master_seed = _require_master_seed(config)
    mean_degree = config.topology.mean_degree
    rows = []
    for n in config.n_values:
        if n < 2:
            raise ConfigError(f"poisson sweep needs n >= 2, got n={n}")
        p = mean_degree / (n - 1)
        if p > 1.0:
            raise ConfigError(
                f"mean_degree {mean_degree} needs n > {mean_degree + 1}; got n={n} (p>1)"
            )
        spec = config.cov.spec_for(n)
        try:
            rules = broadcast_rules(config.rules, n)
        except ValueError as exc:
            raise ConfigError(f"rules: {exc}") from exc
        params = DegreeParams(n=n, p=p)
        graphs, reps = config.graph_replicates, config.replicates
        biases = np.empty((graphs, reps))

        def one_graph(g: int, n=n, spec=spec, rules=rules, params=params, biases=biases):
            graph = sample_poisson_graph(params, derive_seed(master_seed, n, g))
            weights = bias_weights(graph, spec, rules)
            _fill_biases(biases[g], weights, spec, config.theta,
                         master_seed, n, g, 0, biases.shape[1])

        tasks = [(lambda g=g: one_graph(g)) for g in range(graphs)]
        _run_units(tasks, threads)
        if config.cov.kind == "equi":
            analytic = expected_bias_variance_poisson(
                AsymptoticParams(n=n, sigma2=config.cov.sigma2, mean_degree=mean_degree)
            )
        else:
            analytic = math.nan
        rows.append(_summary_row(n, biases.ravel(), analytic,
                                 derive_seed(master_seed, n), False))
    return SweepResult(rows=rows)


# ---------------------------------------------------------------------------
# CSV output: full double precision, '.' decimal separator, byte-stable.
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return repr(float(value))


def results_csv_string(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for row in result.rows:
        lines.append(
            f"{row.n},{_fmt(row.mean_bias)},{_fmt(row.var_bias)},{_fmt(row.se_mean)},"
            f"{_fmt(row.se_var)},{_fmt(row.analytic_var)},{row.replicates_used},{row.seed_base}"
        )
    return "\n".join(lines) + "\n"


def write_results(result: SweepResult, path: str) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(results_csv_string(result))
    except OSError as exc:
        raise RuntimeError(f"cannot write results to {path}: {exc}") from exc


def read_results(path: str) -> SweepResult:
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise RuntimeError(f"cannot read results from {path}: {exc}") from exc
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} does not carry the sweep CSV header {CSV_HEADER!r}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 8:
            raise ValueError(f"malformed sweep CSV row: {ln!r}")
        rows.append(SweepRow(
            n=int(parts[0]), mean_bias=float(parts[1]), var_bias=float(parts[2]),
            se_mean=float(parts[3]), se_var=float(parts[4]), analytic_var=float(parts[5]),
            replicates_used=int(parts[6]), seed_base=int(parts[7]),
        ))
    return SweepResult(rows=rows)
