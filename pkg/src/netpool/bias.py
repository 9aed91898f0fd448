"""Network bias, attention centrality, and closed-form variance predictors.

The network bias is the decision-maker's pooled value after one round of
expert communication minus her pooled value without communication. Under
all-simple-average rules it reduces to (1/n) sum_i alpha_i x_i, where
alpha is the attention centrality

    alpha_i = sum_{j in N_i} 1/d_j - 1         (self-inclusive),

the net collective emphasis the network places on expert i. Attention
sums to zero on every network and vanishes identically on d-regular
networks, which therefore produce zero bias for every realization.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .covariance import CovarianceSpec, dimension_of
from .graphs import Graph
from .pooling import (
    RuleAssignment,
    bayes_pool_dm,
    combine_combined,
    dm_weights,
    expert_pool_matrix,
    simple_average_dm,
)

__all__ = [
    "attention_centrality",
    "attention_fractions",
    "bias_weights",
    "network_bias",
    "network_bias_direct",
    "bias_variance_from_alpha",
    "bias_variance_reduced",
    "star_bias_variance",
    "line_bias_variance",
    "dm_posterior_precision",
    "is_zero_attention_structure",
    "alpha_csv_string",
]

ALPHA_ZERO_TOL = 1e-12


def attention_fractions(g: Graph) -> list:
    """Attention centrality as exact rationals.

    Degrees are integers, so each alpha_i is a rational number; computing
    in exact arithmetic makes regular networks come out at literal zero
    instead of rounding noise.
    """
    degrees = [int(d) for d in g.degrees]
    recip = {d: Fraction(1, d) for d in set(degrees)}
    alphas = []
    for i in range(g.n):
        total = sum((recip[degrees[j]] for j in g.neighborhood(i)), Fraction(0))
        alphas.append(total - 1)
    return alphas


def attention_centrality(g: Graph) -> np.ndarray:
    """alpha_i = sum over the self-inclusive neighborhood of 1/d_j, minus 1."""
    return np.array([float(a) for a in attention_fractions(g)])


def bias_weights(g: Graph, spec: CovarianceSpec, rules: RuleAssignment) -> np.ndarray:
    """Weights c with network bias = c . x.

    Both pooled values are linear in x, so their difference is too:
    c = W' w - w, with W the expert pooling matrix and w the
    decision-maker's weights. Evaluating the bias through c avoids
    subtracting two nearly equal pooled values, which would waste most of
    the precision on cancellation. When every rule is the simple average,
    c_j = alpha_j / n exactly, computed in rational arithmetic.
    """
    n = g.n
    if rules.n != n or dimension_of(spec) != n:
        raise ValueError("graph, covariance, and rule dimensions must agree")
    if rules.all_simple():
        return np.array([float(a / n) for a in attention_fractions(g)])
    w = dm_weights(spec, rules.dm_rule, n)
    weights = expert_pool_matrix(g, spec, rules)
    return weights.T @ w - w


def network_bias(g: Graph, x, spec: CovarianceSpec, rules: RuleAssignment) -> float:
    """Pooled-with-communication minus pooled-without, for one forecast vector.

    Numerically evaluated as bias_weights(g, spec, rules) . x; equal to
    combine_combined(g, x, spec, rules) minus the decision-maker's direct
    pool of x.
    """
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (g.n,):
        raise ValueError(f"forecast vector shape {xv.shape} does not match n={g.n}")
    return float(bias_weights(g, spec, rules) @ xv)


def network_bias_direct(g: Graph, x, spec: CovarianceSpec, rules: RuleAssignment) -> float:
    """Literal difference of the two pooled values. Used as a cross-check."""
    if rules.dm_rule == "S":
        direct = simple_average_dm(x)
    else:
        direct = bayes_pool_dm(x, spec)[0]
    return combine_combined(g, x, spec, rules) - direct


def bias_variance_from_alpha(alphas, sigma2: float, rho: float) -> float:
    """Conditional bias variance on a fixed network, equicorrelated errors.

    (sigma2/n) * [ (1/n) sum alpha_i^2 + (2 rho / n) sum_{i<j} alpha_i alpha_j ]
    """
    a = np.asarray(alphas, dtype=np.float64)
    n = a.size
    cross = np.sum(np.triu(np.outer(a, a), k=1))
    return sigma2 / n * (float(a @ a) / n + 2.0 * rho / n * float(cross))


def bias_variance_reduced(alphas, sigma2: float, rho: float) -> float:
    """Same variance via the sum-to-zero identity: sigma2 (1-rho) sum alpha^2 / n^2."""
    a = np.asarray(alphas, dtype=np.float64)
    n = a.size
    return sigma2 * (1.0 - rho) * float(a @ a) / n**2


def star_bias_variance(n: int, sigma2: float, rho: float) -> float:
    """Bias variance on the star with n nodes: sigma2 (n-2)^2 (n-1)(1-rho) / (4 n^3).

    Increasing in n, with limit sigma2 (1-rho) / 4.
    """
    if n < 3:
        raise ValueError(f"star variance needs n >= 3, got {n}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    return sigma2 * (n - 2) ** 2 * (n - 1) * (1.0 - rho) / (4.0 * n**3)


def line_bias_variance(n: int, sigma2: float, rho: float) -> float:
    """Bias variance on the line with n >= 4 nodes: sigma2 (1-rho) / (9 n^2).

    Decreasing in n, with limit 0.
    """
    if n < 4:
        raise ValueError(f"line variance needs n >= 4, got {n}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    return sigma2 * (1.0 - rho) / (9.0 * n**2)


def dm_posterior_precision(n: int, sigma2: float, rho: float) -> float:
    """Decision-maker posterior precision n / (sigma2 (1 + (n-1) rho)).

    For rho > 0 this increases in n toward the ceiling 1/(sigma2 rho):
    correlated experts cannot deliver unbounded precision. For rho = 0 it
    is n/sigma2, unbounded.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if sigma2 <= 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    return n / (sigma2 * (1.0 + (n - 1) * rho))


def is_zero_attention_structure(g: Graph) -> bool:
    """True when every attention centrality is zero (within 1e-12).

    d-regular networks always qualify. Whether any non-regular network
    does is left open; this predicate never claims the converse.
    """
    return bool(np.max(np.abs(attention_centrality(g))) <= ALPHA_ZERO_TOL)


def alpha_csv_string(alphas) -> str:
    """CSV export of an attention vector, columns node,alpha (1-based nodes)."""
    lines = ["node,alpha"]
    for i, a in enumerate(np.asarray(alphas, dtype=np.float64)):
        lines.append(f"{i + 1},{float(a)!r}")
    return "\n".join(lines) + "\n"
