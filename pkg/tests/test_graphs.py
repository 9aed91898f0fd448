import math

import numpy as np
import pytest

from netpool.graphs import (
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


def _check_valid(g: Graph):
    a = g.adjacency
    assert a.shape == (g.n, g.n)
    assert np.array_equal(a, a.T)
    assert np.array_equal(np.diag(a), np.ones(g.n, dtype=a.dtype))
    assert set(np.unique(a)) <= {0, 1}


def test_star_shape_and_degrees():
    g = make_star(5)
    _check_valid(g)
    # hub is node 0 and sees everyone; leaves see themselves and the hub
    assert g.degrees[0] == 5
    assert list(g.degrees[1:]) == [2, 2, 2, 2]
    assert list(g.neighborhood(2)) == [0, 2]


def test_line_shape_and_degrees():
    g = make_line(4)
    _check_valid(g)
    assert list(g.degrees) == [2, 3, 3, 2]
    assert list(g.neighborhood(1)) == [0, 1, 2]


def test_star_and_line_minimum_sizes():
    with pytest.raises(ValueError):
        make_star(2)
    with pytest.raises(ValueError):
        make_line(1)


def test_d_regular_degrees():
    for n, d in [(6, 2), (6, 3), (7, 4), (10, 5), (8, 7)]:
        g = make_d_regular(n, d)
        _check_valid(g)
        assert list(g.degrees) == [d + 1] * n


def test_d_regular_rejects_impossible_pairs():
    with pytest.raises(ValueError):
        make_d_regular(7, 3)  # n*d odd
    with pytest.raises(ValueError):
        make_d_regular(5, 5)  # d must stay below n
    with pytest.raises(ValueError):
        make_d_regular(4, 0)


def test_ring_of_three_is_complete():
    assert np.array_equal(make_d_regular(3, 2).adjacency, np.ones((3, 3), dtype=np.int64))


def test_graph_validation_rejects_bad_matrices():
    ok = np.eye(3, dtype=np.int64)
    bad_diag = ok.copy()
    bad_diag[0, 0] = 0
    with pytest.raises(ValueError):
        Graph(n=3, adjacency=bad_diag)
    asym = ok.copy()
    asym[0, 1] = 1
    with pytest.raises(ValueError):
        Graph(n=3, adjacency=asym)
    weighted = ok.astype(float)
    weighted[0, 1] = weighted[1, 0] = 0.5
    with pytest.raises(ValueError):
        Graph(n=3, adjacency=weighted)


def test_poisson_sampling_is_seed_deterministic():
    params = DegreeParams(n=40, p=0.15)
    g1 = sample_poisson_graph(params, 999)
    g2 = sample_poisson_graph(params, 999)
    g3 = sample_poisson_graph(params, 1000)
    assert np.array_equal(g1.adjacency, g2.adjacency)
    assert not np.array_equal(g1.adjacency, g3.adjacency)
    _check_valid(g1)


def test_poisson_extreme_probabilities():
    empty = sample_poisson_graph(DegreeParams(n=10, p=0.0), 7)
    assert np.array_equal(empty.adjacency, np.eye(10, dtype=np.int64))
    full = sample_poisson_graph(DegreeParams(n=10, p=1.0), 7)
    assert np.array_equal(full.adjacency, np.ones((10, 10), dtype=np.int64))


def test_poisson_edge_frequency_matches_p():
    # frequency over many draws should sit near p
    params = DegreeParams(n=30, p=0.2)
    m = 30 * 29 // 2
    total = 0
    draws = 200
    for s in range(draws):
        a = sample_poisson_graph(params, s).adjacency
        total += (np.sum(a) - 30) // 2
    freq = total / (m * draws)
    assert abs(freq - 0.2) < 0.01


def test_expected_degree():
    assert DegreeParams(n=26, p=0.2).expected_degree == pytest.approx(5.0)


def test_neighbor_count_pmf_is_binomial():
    params = DegreeParams(n=11, p=0.3)
    pmf = [neighbor_count_pmf(params, d) for d in range(11)]
    assert sum(pmf) == pytest.approx(1.0, abs=1e-12)
    assert pmf[0] == pytest.approx(0.7**10, rel=1e-12)
    assert pmf[3] == pytest.approx(math.comb(10, 3) * 0.3**3 * 0.7**7, rel=1e-12)
    mean = sum(d * p for d, p in enumerate(pmf))
    assert mean == pytest.approx(params.expected_degree, rel=1e-12)


def test_neighbor_degree_pmf_is_size_biased():
    params = DegreeParams(n=11, p=0.3)
    pmf = [neighbor_degree_pmf(params, d) for d in range(11)]
    assert pmf[0] == 0.0
    assert sum(pmf) == pytest.approx(1.0, abs=1e-12)
    # size-biasing multiplies by d/<d>
    assert pmf[4] == pytest.approx(neighbor_count_pmf(params, 4) * 4 / 3.0, rel=1e-12)


def test_neighbor_degree_pmf_rejects_p_zero():
    with pytest.raises(ValueError):
        neighbor_degree_pmf(DegreeParams(n=5, p=0.0), 1)


def test_edge_list_round_trip():
    rng = np.random.default_rng(5150)
    for _ in range(25):
        n = int(rng.integers(2, 15))
        g = sample_poisson_graph(DegreeParams(n=n, p=float(rng.uniform(0, 1))), int(rng.integers(1 << 30)))
        back = parse_edge_list(edge_list_string(g))
        assert np.array_equal(back.adjacency, g.adjacency)


def test_edge_list_format():
    text = edge_list_string(make_star(3))
    assert text == "n=3\n1 2\n1 3\n"


def test_parse_edge_list_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="header"):
        parse_edge_list("3\n1 2\n")
    with pytest.raises(ValueError, match="line 2"):
        parse_edge_list("n=3\n2 1\n")
    with pytest.raises(ValueError, match="line 3"):
        parse_edge_list("n=3\n1 2\n1 4\n")


def test_edge_list_file_round_trip(tmp_path):
    g = make_line(6)
    path = tmp_path / "line.edges"
    write_edge_list(g, str(path))
    assert np.array_equal(read_edge_list(str(path)).adjacency, g.adjacency)


def test_read_edge_list_missing_file():
    with pytest.raises(RuntimeError, match="no/such"):
        read_edge_list("no/such/file.edges")
