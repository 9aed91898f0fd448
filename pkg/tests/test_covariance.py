import numpy as np
import pytest

from netpool.covariance import (
    Equicorrelated,
    GeneralCovariance,
    Heterogeneous,
    covariance_matrix,
    make_draw,
    precision_matrix_closed_form,
    precision_of,
    sample_errors,
)


def test_equicorrelated_matrix():
    m = covariance_matrix(Equicorrelated(n=3, sigma2=2.0, rho=0.5))
    expected = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
    np.testing.assert_allclose(m, expected, atol=1e-15)


def test_heterogeneous_matrix():
    m = covariance_matrix(Heterogeneous(sigmas=(1.0, 2.0), rho=0.25))
    np.testing.assert_allclose(m, [[1.0, 0.5], [0.5, 4.0]], atol=1e-15)


def test_parameter_validation():
    with pytest.raises(ValueError):
        Equicorrelated(n=3, sigma2=-1.0, rho=0.0)
    with pytest.raises(ValueError):
        Equicorrelated(n=3, sigma2=1.0, rho=1.0)
    with pytest.raises(ValueError):
        Equicorrelated(n=3, sigma2=1.0, rho=-0.1)
    with pytest.raises(ValueError):
        Heterogeneous(sigmas=(1.0, -2.0), rho=0.0)
    with pytest.raises(ValueError):
        GeneralCovariance(matrix=np.array([[1.0, 2.0], [2.0, 1.0]]))  # not PD
    with pytest.raises(ValueError):
        GeneralCovariance(matrix=np.array([[1.0, 0.4], [0.1, 1.0]]))  # not symmetric


def test_precision_closed_form_inverts_covariance():
    rng = np.random.default_rng(321)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 21))
        sigmas = tuple(float(s) for s in rng.uniform(0.1, 10.0, size=n))
        rho = float(rng.uniform(0.0, 0.95))
        spec = Heterogeneous(sigmas=sigmas, rho=rho)
        closed = precision_matrix_closed_form(sigmas, rho)
        numeric = np.linalg.inv(covariance_matrix(spec))
        worst = max(worst, float(np.max(np.abs(closed - numeric))))
    assert worst < 1e-9


def test_precision_of_matches_closed_form_for_equi():
    spec = Equicorrelated(n=4, sigma2=1.5, rho=0.3)
    np.testing.assert_allclose(
        precision_of(spec),
        precision_matrix_closed_form((np.sqrt(1.5),) * 4, 0.3),
        atol=1e-12,
    )


def test_precision_of_single_expert():
    np.testing.assert_allclose(precision_of(Equicorrelated(n=1, sigma2=4.0, rho=0.0)), [[0.25]])


def test_precision_of_general_uses_numeric_inverse():
    m = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 1.5]])
    spec = GeneralCovariance(matrix=m)
    np.testing.assert_allclose(precision_of(spec) @ m, np.eye(3), atol=1e-12)


def test_sample_errors_deterministic_by_seed():
    spec = Equicorrelated(n=6, sigma2=1.2, rho=0.4)
    e1 = sample_errors(spec, 42)
    e2 = sample_errors(spec, 42)
    e3 = sample_errors(spec, 43)
    np.testing.assert_array_equal(e1, e2)
    assert not np.array_equal(e1, e3)


def test_sample_errors_empirical_covariance():
    spec = Heterogeneous(sigmas=(1.0, 2.0, 0.5), rho=0.6)
    target = covariance_matrix(spec)
    draws = np.stack([sample_errors(spec, s) for s in range(20000)])
    emp = np.cov(draws.T)
    np.testing.assert_allclose(emp, target, rtol=0.08, atol=0.03)
    assert np.max(np.abs(draws.mean(axis=0))) < 0.05


def test_sample_errors_uncorrelated_path_scales_directly():
    # rho = 0 draws are the standard normals scaled per coordinate
    spec = Heterogeneous(sigmas=(0.5, 3.0), rho=0.0)
    e = sample_errors(spec, 11)
    raw = np.random.default_rng(11)
    np.testing.assert_allclose(e, raw.standard_normal(2) * np.array([0.5, 3.0]), atol=1e-15)


def test_make_draw_offsets_by_theta():
    spec = Equicorrelated(n=3, sigma2=1.0, rho=0.0)
    draw = make_draw(2.5, spec, 77)
    np.testing.assert_allclose(draw.forecasts, 2.5 + draw.errors, atol=1e-15)
    assert draw.theta == 2.5
