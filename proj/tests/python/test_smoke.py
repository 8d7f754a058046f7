import json
import math

import pytest

import tailselect as ts


def test_catalog():
    names = [s.name for s in ts.scenario_catalog()]
    assert len(names) == 6
    assert "setup1_pareto" in names and "setup2_frechet" in names
    sc = ts.scenario_by_name("setup1_pareto")
    assert sc.k == 10
    assert sc.best_index() == 0
    assert not sc.tie
    assert ts.scenario_by_name("setup2_pareto").tie_indices() == [0, 9]


def test_distribution_oracles():
    p = ts.make_pareto(4.0, 0.75)
    assert ts.mean(p) == pytest.approx(1.0)
    assert ts.tail_index(p) == pytest.approx(0.25)
    assert ts.survival(p, 1.5) == pytest.approx((0.75 / 1.5) ** 4)
    assert ts.cvar_level(p, 0.99) == pytest.approx(
        ts.var_level(p, 0.99) * 4.0 / 3.0
    )


def test_sampling_determinism():
    p = ts.make_pareto(4.0, 0.75)
    a = [ts.sample(p, ts.Rng(123)) for _ in range(3)]
    b = [ts.sample(p, ts.Rng(123)) for _ in range(3)]
    assert a == b


def test_estimators():
    store = ts.SampleStore(1)
    for x in [1.0, 2.0, 4.0, 8.0]:
        store.add(0, x)
    assert ts.est_tail_prob(store, 0, 2.0) == pytest.approx(0.5)
    # Quantile rank ceil(0.75 * 4) = 3; the tail average adds nu times the
    # mean excess over it: 4 + 4 * mean([0, 0, 0, 4]).
    assert ts.est_var(store, 0, 0.75) == pytest.approx(4.0)
    assert ts.est_cvar(store, 0, 4.0) == pytest.approx(8.0)


def test_rate_solver():
    betas = [0.2 + 0.025 * i for i in range(1, 11)]
    res = ts.maximize_rate(betas)
    assert res["value"] == pytest.approx(0.00115289, abs=5e-8)
    assert res["alpha"][0] == pytest.approx(0.4111, abs=2e-3)
    assert sum(res["alpha"]) == pytest.approx(1.0)
    assert ts.project_simplex([0.8, 0.8, -0.1]) == pytest.approx([0.5, 0.5, 0])
    assert ts.largest_remainder([1, 1, 1], 100) == [34, 33, 33]


def test_policy_run():
    r = ts.run_tiro("setup1_pareto", 2000, seed=7)
    assert sum(r["counts"]) == 2000
    assert 0 <= r["selected"] < 10
    again = ts.run_tiro("setup1_pareto", 2000, seed=7)
    assert r == again
    s = ts.run_static("setup1_pareto", [0.1] * 10, 2000, seed=7)
    assert s["counts"] == [200] * 10


def test_experiment_json():
    cfg = {
        "scenario": "setup1_pareto",
        "methods": [{"id": "tiro", "policy": "tiro"}],
        "budgets": [1500, 2000],
        "trials": 5,
        "base_seed": 11,
        "parallelism": 1,
        "output": "",
    }
    rows = ts.run_experiment_json(json.dumps(cfg))
    assert len(rows) == 2
    assert rows[0]["trials"] == 5
    assert 0.0 <= rows[0]["pfs"] <= 1.0
    se = rows[0]["stderr"]
    p = rows[0]["pfs"]
    assert se == pytest.approx(math.sqrt(p * (1 - p) / 5))


def test_plot_svg():
    csv = "method,T,trials,false_count,pfs,stderr\nm,100,10,0,0,0\nm,200,10,1,0.1,0.09\n"
    svg = ts.render_pfs_svg(csv, logy=True)
    assert svg.startswith("<svg")
    assert "polyline" in svg
    assert "1/(2*trials)" in svg
