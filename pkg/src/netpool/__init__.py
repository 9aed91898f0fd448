"""Forecast pooling on expert networks.

Experts sit on an undirected graph, swap forecasts with their neighbors
once, and a decision maker pools the result. The library measures what
that single round of communication does to the pooled value: the network
bias, its attention-centrality decomposition, closed-form variances for
named topologies, Poisson random-graph asymptotics, and a deterministic
Monte Carlo harness with a CLI on top.
"""

from .asymptotics import (
    AsymptoticParams,
    EULER_GAMMA,
    expected_bias_variance_poisson,
    expected_choose2,
    expected_recip_neighbor_degree,
    expected_recip_neighbor_degree_sq,
    exponential_integral,
    k_factor,
    k_times_one_plus_d,
)
from .bias import (
    attention_centrality,
    attention_fractions,
    bias_variance_from_alpha,
    bias_variance_reduced,
    bias_weights,
    dm_posterior_precision,
    is_zero_attention_structure,
    line_bias_variance,
    network_bias,
    network_bias_direct,
    star_bias_variance,
)
from .covariance import (
    CovarianceSpec,
    Equicorrelated,
    ForecastDraw,
    GeneralCovariance,
    Heterogeneous,
    covariance_matrix,
    make_draw,
    precision_matrix_closed_form,
    precision_of,
    sample_errors,
)
from .experiments import (
    ConfigError,
    CovConfig,
    ExperimentConfig,
    SweepResult,
    SweepRow,
    TopologyConfig,
    build_topology,
    config_from_dict,
    load_config,
    read_results,
    results_csv_string,
    run_fixed_graph,
    run_random_graph,
    write_results,
)
from .graphs import (
    DegreeParams,
    Graph,
    edge_list_string,
    make_d_regular,
    make_line,
    make_star,
    neighbor_count_pmf,
    neighbor_degree_pmf,
    parse_edge_list,
    read_edge_list,
    sample_poisson_graph,
    write_edge_list,
)
from .pooling import (
    RuleAssignment,
    bayes_pool_dm,
    bayes_pool_expert,
    broadcast_rules,
    combine_combined,
    combined_forecasts,
    expert_pool_matrix,
    format_rule_assignment,
    linear_pool,
    parse_rule_assignment,
    simple_average_dm,
    simple_average_expert,
)
from .seeding import derive_seed, rng_for

__version__ = "0.1.0"

__all__ = [
    "AsymptoticParams",
    "EULER_GAMMA",
    "expected_bias_variance_poisson",
    "expected_choose2",
    "expected_recip_neighbor_degree",
    "expected_recip_neighbor_degree_sq",
    "exponential_integral",
    "k_factor",
    "k_times_one_plus_d",
    "attention_centrality",
    "attention_fractions",
    "bias_variance_from_alpha",
    "bias_variance_reduced",
    "bias_weights",
    "dm_posterior_precision",
    "is_zero_attention_structure",
    "line_bias_variance",
    "network_bias",
    "network_bias_direct",
    "star_bias_variance",
    "CovarianceSpec",
    "Equicorrelated",
    "ForecastDraw",
    "GeneralCovariance",
    "Heterogeneous",
    "covariance_matrix",
    "make_draw",
    "precision_matrix_closed_form",
    "precision_of",
    "sample_errors",
    "ConfigError",
    "CovConfig",
    "ExperimentConfig",
    "SweepResult",
    "SweepRow",
    "TopologyConfig",
    "build_topology",
    "config_from_dict",
    "load_config",
    "read_results",
    "results_csv_string",
    "run_fixed_graph",
    "run_random_graph",
    "write_results",
    "DegreeParams",
    "Graph",
    "edge_list_string",
    "make_d_regular",
    "make_line",
    "make_star",
    "neighbor_count_pmf",
    "neighbor_degree_pmf",
    "parse_edge_list",
    "read_edge_list",
    "sample_poisson_graph",
    "write_edge_list",
    "RuleAssignment",
    "bayes_pool_dm",
    "bayes_pool_expert",
    "broadcast_rules",
    "combine_combined",
    "combined_forecasts",
    "expert_pool_matrix",
    "format_rule_assignment",
    "linear_pool",
    "parse_rule_assignment",
    "simple_average_dm",
    "simple_average_expert",
    "derive_seed",
    "rng_for",
    "__version__",
]
