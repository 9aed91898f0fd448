"""Pooling rules for the decision-maker and the networked experts.

Two rules exist. Simple average (S) replaces a forecast with the
arithmetic mean over the self-inclusive neighborhood. Bayesian pooling (B)
is the normal posterior mean, weighting forecasts by the precision matrix;
the decision-maker sees everyone, an expert sees only her neighborhood
(own forecast included through the self-loop).

Experts update simultaneously, exactly once, from the original forecast
vector. The decision-maker then pools the updated vector with her own
rule, reusing the original error covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceSpec, dimension_of, precision_of
from .graphs import Graph

__all__ = [
    "RuleAssignment",
    "parse_rule_assignment",
    "format_rule_assignment",
    "broadcast_rules",
    "linear_pool",
    "simple_average_dm",
    "simple_average_expert",
    "bayes_pool_dm",
    "bayes_pool_expert",
    "expert_pool_matrix",
    "dm_weights",
    "combined_forecasts",
    "combine_combined",
]

_RULES = ("S", "B")


@dataclass(frozen=True)
class RuleAssignment:
    """Pooling rule per agent: the decision-maker and each of n experts."""

    dm_rule: str
    expert_rules: tuple

    def __post_init__(self):
        rules = tuple(self.expert_rules)
        if self.dm_rule not in _RULES:
            raise ValueError(f"decision-maker rule must be one of {_RULES}, got {self.dm_rule!r}")
        if not rules:
            raise ValueError("expert_rules must be nonempty")
        bad = [r for r in rules if r not in _RULES]
        if bad:
            raise ValueError(f"expert rules must be one of {_RULES}, got {bad[0]!r}")
        object.__setattr__(self, "expert_rules", rules)

    @property
    def n(self) -> int:
        return len(self.expert_rules)

    def all_simple(self) -> bool:
        return self.dm_rule == "S" and all(r == "S" for r in self.expert_rules)


def parse_rule_assignment(text: str) -> RuleAssignment:
    """Parse 'DM|EXPERTS' strings such as 'S|SSB' (decision-maker first)."""
    parts = text.split("|")
    if len(parts) != 2 or len(parts[0]) != 1 or not parts[1]:
        raise ValueError(f"rule string must look like 'S|SSB', got {text!r}")
    return RuleAssignment(dm_rule=parts[0], expert_rules=tuple(parts[1]))


def format_rule_assignment(rules: RuleAssignment) -> str:
    return f"{rules.dm_rule}|{''.join(rules.expert_rules)}"


def broadcast_rules(pattern: str, n: int) -> RuleAssignment:
    """Rule pattern for n experts: expert part of length 1 broadcasts to all."""
    parsed = parse_rule_assignment(pattern)
    if parsed.n == n:
        return parsed
    if parsed.n == 1:
        return RuleAssignment(parsed.dm_rule, parsed.expert_rules * n)
    raise ValueError(
        f"rules pattern {pattern!r} has {parsed.n} expert entries, expected 1 or {n}"
    )


def linear_pool(weights, x) -> float:
    """Generic linear pool: sum of w_j * x_j. Weights are unconstrained."""
    w = np.asarray(weights, dtype=np.float64)
    xv = np.asarray(x, dtype=np.float64)
    if w.shape != xv.shape:
        raise ValueError(f"weights shape {w.shape} does not match forecasts shape {xv.shape}")
    return float(w @ xv)


def simple_average_dm(x) -> float:
    """Decision-maker simple average: mean of all n forecasts."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.size == 0:
        raise ValueError("cannot pool an empty forecast vector")
    return float(np.mean(xv))


def simple_average_expert(g: Graph, i: int, x) -> float:
    """Expert i's simple average over her self-inclusive neighborhood."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (g.n,):
        raise ValueError(f"forecast vector shape {xv.shape} does not match n={g.n}")
    if not 0 <= i < g.n:
        raise IndexError(f"expert index {i} out of range for n={g.n}")
    mask = g.adjacency[i] == 1
    return float(xv[mask].mean())


def bayes_pool_dm(x, spec: CovarianceSpec):
    """Decision-maker Bayesian pool over all experts.

    Returns (posterior mean, posterior variance):
        mean = (1' P x) / (1' P 1),  variance = 1 / (1' P 1)
    with P the precision matrix of spec.
    """
    xv = np.asarray(x, dtype=np.float64)
    n = dimension_of(spec)
    if xv.shape != (n,):
        raise ValueError(f"forecast vector shape {xv.shape} does not match n={n}")
    prec = precision_of(spec)
    col = prec.sum(axis=0)
    quad = float(col.sum())
    return float(col @ xv) / quad, 1.0 / quad


def bayes_pool_expert(g: Graph, i: int, x, spec: CovarianceSpec):
    """Expert i's Bayesian pool over her neighborhood.

    Masks the forecast vector to the neighborhood (x(i) = A_{*i} .* x) and
    returns (mean, variance):
        mean = (A_{i*} P x(i)) / (A_{i*} P A_{*i}),  variance = its inverse.
    The self-loop keeps the expert's own forecast in the data.
    """
    xv = np.asarray(x, dtype=np.float64)
    n = dimension_of(spec)
    if g.n != n or xv.shape != (n,):
        raise ValueError("graph, forecasts, and covariance dimensions must agree")
    if not 0 <= i < n:
        raise IndexError(f"expert index {i} out of range for n={n}")
    ai = g.adjacency[i].astype(np.float64)
    prec = precision_of(spec)
    pai = prec @ ai
    quad = float(ai @ pai)
    mean = float(pai @ (ai * xv)) / quad
    return mean, 1.0 / quad


def expert_pool_matrix(g: Graph, spec: CovarianceSpec, rules: RuleAssignment) -> np.ndarray:
    """Row i holds expert i's pooling weights over the original forecasts.

    Simple-average rows are a_i / d_i. Bayesian rows are the weights of
    bayes_pool_expert's mean, which is linear in x:
        w_ik = a_ik (P a_i)_k / (a_i' P a_i).
    """
    n = g.n
    if rules.n != n or dimension_of(spec) != n:
        raise ValueError("graph, covariance, and rule dimensions must agree")
    a = g.adjacency.astype(np.float64)
    weights = np.zeros((n, n))
    srows = np.array([r == "S" for r in rules.expert_rules])
    if srows.any():
        weights[srows] = a[srows] / a[srows].sum(axis=1, keepdims=True)
    if not srows.all():
        prec = precision_of(spec)
        q = a @ prec
        masked = q * a
        brows = ~srows
        weights[brows] = masked[brows] / masked[brows].sum(axis=1, keepdims=True)
    return weights


def dm_weights(spec: CovarianceSpec, rule: str, n: int) -> np.ndarray:
    """Decision-maker pooling weights over an n-vector of forecasts."""
    if rule == "S":
        return np.full(n, 1.0 / n)
    if rule == "B":
        if dimension_of(spec) != n:
            raise ValueError("covariance dimension does not match n")
        col = precision_of(spec).sum(axis=0)
        return col / col.sum()
    raise ValueError(f"unknown pooling rule {rule!r}")


def combined_forecasts(g: Graph, x, spec: CovarianceSpec, rules: RuleAssignment) -> np.ndarray:
    """One simultaneous update round: every expert pools the original x."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (g.n,):
        raise ValueError(f"forecast vector shape {xv.shape} does not match n={g.n}")
    return expert_pool_matrix(g, spec, rules) @ xv


def combine_combined(g: Graph, x, spec: CovarianceSpec, rules: RuleAssignment) -> float:
    """Decision-maker's pool of the combined forecasts, under her own rule.

    The Bayesian decision-maker reuses the original covariance; the one
    update round does not re-derive the covariance of the updated vector.
    """
    updated = combined_forecasts(g, x, spec, rules)
    if rules.dm_rule == "S":
        return simple_average_dm(updated)
    return bayes_pool_dm(updated, spec)[0]
