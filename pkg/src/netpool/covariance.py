"""Covariance models for forecast errors and reproducible normal sampling.

Forecast errors are jointly normal with mean zero. Three covariance
families are supported: equicorrelated (common variance and correlation),
heterogeneous (per-expert variances, common correlation), and a general
symmetric positive-definite matrix. The common-correlation families have a
closed-form precision matrix, used everywhere instead of a numeric inverse.

Correlations are restricted to rho in [0, 1): the analytical results hold
for common nonnegative correlation, so negative rho is rejected rather
than silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

__all__ = [
    "Equicorrelated",
    "Heterogeneous",
    "GeneralCovariance",
    "CovarianceSpec",
    "ForecastDraw",
    "dimension_of",
    "covariance_matrix",
    "precision_matrix_closed_form",
    "precision_of",
    "sample_errors",
    "make_draw",
]


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")


@dataclass(frozen=True)
class Equicorrelated:
    """Common variance sigma2 and common correlation rho across n experts."""

    n: int
    sigma2: float
    rho: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.sigma2 <= 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        _check_rho(self.rho)


@dataclass(frozen=True)
class Heterogeneous:
    """Per-expert standard deviations with a common correlation rho."""

    sigmas: tuple
    rho: float

    def __post_init__(self):
        sigmas = tuple(float(s) for s in self.sigmas)
        if len(sigmas) < 1:
            raise ValueError("sigmas must be nonempty")
        if any(s <= 0.0 for s in sigmas):
            raise ValueError(f"all sigmas must be positive, got {sigmas}")
        _check_rho(self.rho)
        object.__setattr__(self, "sigmas", sigmas)


@dataclass(frozen=True, eq=False)
class GeneralCovariance:
    """Arbitrary symmetric positive-definite covariance matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"covariance must be a square matrix, got shape {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
            raise ValueError("covariance matrix must be symmetric")
        m = 0.5 * (m + m.T)
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            raise ValueError("covariance matrix must be positive definite") from None
        object.__setattr__(self, "matrix", m)


CovarianceSpec = Union[Equicorrelated, Heterogeneous, GeneralCovariance]


@dataclass(frozen=True)
class ForecastDraw:
    """One joint draw: truth theta, errors eps, forecasts x = theta + eps."""

    theta: float
    errors: np.ndarray
    forecasts: np.ndarray


def dimension_of(spec: CovarianceSpec) -> int:
    if isinstance(spec, Equicorrelated):
        return spec.n
    if isinstance(spec, Heterogeneous):
        return len(spec.sigmas)
    return spec.matrix.shape[0]


def covariance_matrix(spec: CovarianceSpec) -> np.ndarray:
    """Dense covariance: diagonal sigma_i^2, off-diagonal rho*sigma_i*sigma_j."""
    if isinstance(spec, GeneralCovariance):
        return spec.matrix.copy()
    if isinstance(spec, Equicorrelated):
        sigmas = np.full(spec.n, np.sqrt(spec.sigma2))
        rho = spec.rho
    else:
        sigmas = np.asarray(spec.sigmas, dtype=np.float64)
        rho = spec.rho
    cov = rho * np.outer(sigmas, sigmas)
    np.fill_diagonal(cov, sigmas**2)
    return cov


def precision_matrix_closed_form(sigmas, rho: float) -> np.ndarray:
    """Closed-form inverse of the common-correlation covariance.

    For Sigma with entries rho*sigma_i*sigma_j (variances sigma_i^2 on the
    diagonal), the inverse has

        diagonal:      (1 + (n-2) rho) / ((1-rho)(1+(n-1) rho) sigma_i^2)
        off-diagonal:  -rho / ((1-rho)(1+(n-1) rho) sigma_i sigma_j)

    Requires n >= 2 and rho in [0, 1).
    """
    sig = np.asarray(sigmas, dtype=np.float64)
    n = sig.size
    if n < 2:
        raise ValueError(f"closed form needs n >= 2, got n={n}")
    if np.any(sig <= 0.0):
        raise ValueError("all sigmas must be positive")
    _check_rho(rho)
    denom = (1.0 - rho) * (1.0 + (n - 1) * rho)
    prec = -rho / (denom * np.outer(sig, sig))
    np.fill_diagonal(prec, (1.0 + (n - 2) * rho) / (denom * sig**2))
    return prec


def precision_of(spec: CovarianceSpec) -> np.ndarray:
    """Precision matrix: closed form when available, numeric inverse otherwise."""
    if isinstance(spec, GeneralCovariance):
        return np.linalg.inv(spec.matrix)
    if isinstance(spec, Equicorrelated):
        sigmas = np.full(spec.n, np.sqrt(spec.sigma2))
        rho = spec.rho
    else:
        sigmas = np.asarray(spec.sigmas, dtype=np.float64)
        rho = spec.rho
    if sigmas.size == 1:
        return np.array([[1.0 / sigmas[0] ** 2]])
    return precision_matrix_closed_form(sigmas, rho)


@lru_cache(maxsize=64)
def _transform_cached(spec):
    # Independent errors only need a per-coordinate scale; correlated ones
    # use the (lower) Cholesky factor of the covariance.
    if isinstance(spec, Equicorrelated) and spec.rho == 0.0:
        return "diag", np.full(spec.n, np.sqrt(spec.sigma2))
    if isinstance(spec, Heterogeneous) and spec.rho == 0.0:
        return "diag", np.asarray(spec.sigmas, dtype=np.float64)
    return "chol", np.linalg.cholesky(covariance_matrix(spec))


def _error_transform(spec: CovarianceSpec):
    if isinstance(spec, GeneralCovariance):
        return "chol", np.linalg.cholesky(spec.matrix)
    return _transform_cached(spec)


def sample_errors(spec: CovarianceSpec, seed: int) -> np.ndarray:
    """One zero-mean multivariate normal draw with covariance from spec.

    The draw applies a fixed factorization of the covariance to standard
    normals from a stream keyed by seed, so identical (spec, seed) give the
    identical vector regardless of call order or parallelism.
    """
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dimension_of(spec))
    kind, transform = _error_transform(spec)
    if kind == "diag":
        return transform * z
    return transform @ z


def make_draw(theta: float, spec: CovarianceSpec, seed: int) -> ForecastDraw:
    """Draw errors and attach the truth: forecasts = theta + errors."""
    errors = sample_errors(spec, seed)
    return ForecastDraw(theta=float(theta), errors=errors, forecasts=theta + errors)
