import json
import math

import numpy as np
import pytest

from netpool.bias import attention_centrality, bias_variance_from_alpha
from netpool.experiments import (
    ConfigError,
    SweepResult,
    SweepRow,
    build_topology,
    config_from_dict,
    load_config,
    read_results,
    results_csv_string,
    run_fixed_graph,
    run_random_graph,
    with_master_seed,
    write_results,
)
from netpool.graphs import make_d_regular


BASE = {
    "theta": 3.0,
    "cov": {"kind": "equi", "sigma2": 1.0, "rho": 0.0},
    "topology": {"kind": "star"},
    "n_values": [6],
    "master_seed": 11,
}


def _cfg(**overrides):
    raw = {**BASE, **overrides}
    return config_from_dict(raw)


def test_config_defaults():
    cfg = _cfg()
    assert cfg.replicates == 500
    assert cfg.graph_replicates == 200
    assert cfg.rules == "S|S"
    assert cfg.n_values == (6,)


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="bogus"):
        config_from_dict({**BASE, "bogus": 1})
    with pytest.raises(ConfigError, match="cov.extra"):
        config_from_dict({**BASE, "cov": {"kind": "equi", "sigma2": 1.0, "extra": 2}})
    with pytest.raises(ConfigError, match="topology.mean_degree"):
        config_from_dict({**BASE, "topology": {"kind": "star", "mean_degree": 4}})


def test_config_requires_core_keys():
    for missing in ("theta", "cov", "topology", "n_values"):
        raw = {k: v for k, v in BASE.items() if k != missing}
        with pytest.raises(ConfigError, match=missing):
            config_from_dict(raw)
    with pytest.raises(ConfigError, match="cov.sigma2"):
        config_from_dict({**BASE, "cov": {"kind": "equi"}})
    with pytest.raises(ConfigError, match="topology.d"):
        config_from_dict({**BASE, "topology": {"kind": "d_regular"}})


def test_config_validates_values():
    with pytest.raises(ConfigError, match="n_values"):
        config_from_dict({**BASE, "n_values": []})
    with pytest.raises(ConfigError, match="n_values"):
        config_from_dict({**BASE, "n_values": [0]})
    with pytest.raises(ConfigError, match="replicates"):
        config_from_dict({**BASE, "replicates": 0})
    with pytest.raises(ConfigError, match="rules"):
        config_from_dict({**BASE, "rules": "S|SX"})
    with pytest.raises(ConfigError, match="master_seed"):
        config_from_dict({**BASE, "master_seed": 1.5})
    with pytest.raises(ConfigError, match="cov.kind"):
        config_from_dict({**BASE, "cov": {"kind": "diag", "sigma2": 1.0}})
    with pytest.raises(ConfigError, match="mean_degree"):
        config_from_dict({**BASE, "topology": {"kind": "poisson", "mean_degree": -1.0}})


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(BASE))
    assert load_config(str(path)) == _cfg()


def test_load_config_error_paths(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(str(bad))


def test_build_topology_kinds():
    assert list(build_topology(_cfg().topology, 5).degrees) == [5, 2, 2, 2, 2]
    ring = build_topology(_cfg(topology={"kind": "ring"}).topology, 6)
    assert np.array_equal(ring.adjacency, make_d_regular(6, 2).adjacency)
    comp = build_topology(_cfg(topology={"kind": "complete"}).topology, 4)
    assert np.all(comp.adjacency == 1)
    reg = build_topology(_cfg(topology={"kind": "d_regular", "d": 4}).topology, 9)
    assert list(reg.degrees) == [5] * 9


def test_run_fixed_graph_matches_analytic_variance():
    cfg = _cfg(n_values=[8], replicates=6000, cov={"kind": "equi", "sigma2": 2.0, "rho": 0.3})
    row = run_fixed_graph(cfg).rows[0]
    alphas = attention_centrality(build_topology(cfg.topology, 8))
    want = bias_variance_from_alpha(alphas, 2.0, 0.3)
    assert row.analytic_var == pytest.approx(want, rel=1e-12)
    # normal-theory standard error for the sample variance
    assert abs(row.var_bias - want) < 4 * row.se_var
    assert abs(row.mean_bias) < 4 * row.se_mean
    assert row.replicates_used == 6000


def test_run_fixed_graph_thread_count_is_invisible():
    cfg = _cfg(n_values=[5, 9], replicates=900)
    csv1 = results_csv_string(run_fixed_graph(cfg, threads=1))
    csv3 = results_csv_string(run_fixed_graph(cfg, threads=3))
    csv8 = results_csv_string(run_fixed_graph(cfg, threads=8))
    assert csv1 == csv3 == csv8


def test_run_fixed_graph_seed_changes_draws():
    cfg = _cfg(replicates=200)
    r1 = run_fixed_graph(cfg).rows[0]
    r2 = run_fixed_graph(with_master_seed(cfg, 12)).rows[0]
    assert r1.mean_bias != r2.mean_bias
    assert r1.seed_base != r2.seed_base


def test_run_fixed_graph_non_equi_has_nan_analytic():
    cfg = _cfg(
        replicates=50,
        n_values=[3],
        cov={"kind": "hetero", "sigmas": [1.0, 2.0, 0.5], "rho": 0.0},
    )
    row = run_fixed_graph(cfg).rows[0]
    assert math.isnan(row.analytic_var)
    assert math.isnan(row.se_var)
    assert row.var_bias > 0.0


def test_run_fixed_graph_single_replicate():
    cfg = _cfg(replicates=1)
    row = run_fixed_graph(cfg).rows[0]
    assert row.var_bias == 0.0
    assert math.isnan(row.se_mean)
    assert row.replicates_used == 1


def test_run_fixed_graph_needs_master_seed():
    raw = {k: v for k, v in BASE.items() if k != "master_seed"}
    with pytest.raises(ConfigError, match="master_seed"):
        run_fixed_graph(config_from_dict(raw))


def test_run_fixed_graph_rejects_poisson_topology():
    cfg = _cfg(topology={"kind": "poisson", "mean_degree": 3.0})
    with pytest.raises(ConfigError, match="poisson"):
        run_fixed_graph(cfg)


def test_run_random_graph_rejects_fixed_topology():
    with pytest.raises(ConfigError, match="poisson"):
        run_random_graph(_cfg())


def test_run_random_graph_p_above_one_fails_fast():
    cfg = _cfg(topology={"kind": "poisson", "mean_degree": 8.0}, n_values=[6])
    with pytest.raises(ConfigError, match="n"):
        run_random_graph(cfg)


def test_run_random_graph_complete_limit_has_zero_bias():
    # mean_degree = n - 1 forces p = 1: every sampled graph is complete
    cfg = _cfg(
        topology={"kind": "poisson", "mean_degree": 5.0},
        n_values=[6],
        replicates=40,
        graph_replicates=10,
    )
    row = run_random_graph(cfg).rows[0]
    assert row.mean_bias == 0.0
    assert row.var_bias == 0.0
    assert row.replicates_used == 400


def test_run_random_graph_pools_both_levels_deterministically():
    cfg = _cfg(
        topology={"kind": "poisson", "mean_degree": 3.0},
        n_values=[12, 20],
        replicates=60,
        graph_replicates=25,
        cov={"kind": "equi", "sigma2": 1.2, "rho": 0.0},
    )
    res1 = run_random_graph(cfg, threads=1)
    res4 = run_random_graph(cfg, threads=4)
    assert results_csv_string(res1) == results_csv_string(res4)
    for row in res1.rows:
        assert row.replicates_used == 1500
        assert row.var_bias > 0.0
        assert math.isfinite(row.analytic_var)


def test_results_csv_round_trip(tmp_path):
    rows = [
        SweepRow(n=10, mean_bias=-1.2345678901234567e-4, var_bias=0.0012345678901234567,
                 se_mean=1e-5, se_var=2e-5, analytic_var=math.nan,
                 replicates_used=100, seed_base=987654321),
    ]
    result = SweepResult(rows=rows)
    path = tmp_path / "out.csv"
    write_results(result, str(path))
    back = read_results(str(path))
    assert back.rows[0].n == 10
    assert back.rows[0].mean_bias == rows[0].mean_bias  # repr round-trips exactly
    assert back.rows[0].var_bias == rows[0].var_bias
    assert math.isnan(back.rows[0].analytic_var)
    assert back.rows[0].seed_base == 987654321


def test_results_csv_header_and_stability():
    result = SweepResult(rows=())
    text = results_csv_string(result)
    assert text == "n,mean_bias,var_bias,se_mean,se_var,analytic_var,replicates_used,seed_base\n"
    cfg = _cfg(replicates=30)
    assert results_csv_string(run_fixed_graph(cfg)) == results_csv_string(run_fixed_graph(cfg))


def test_write_results_io_error():
    result = SweepResult(rows=())
    with pytest.raises(RuntimeError, match="missing-dir"):
        write_results(result, "missing-dir/out.csv")


def test_read_results_rejects_foreign_files(tmp_path):
    path = tmp_path / "foreign.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        read_results(str(path))
