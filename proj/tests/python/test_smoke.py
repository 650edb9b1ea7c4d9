import math

import pytest

import oa3al


def test_synthetic_counts():
    ds = oa3al.generate_synthetic(dim=5, n=110, ratio=10, seed=1)
    assert (ds.t_pos, ds.t_neg, len(ds), ds.dim) == (10, 100, 110, 5)


def test_libsvm_round_trip():
    ds = oa3al.parse_libsvm("+1 1:0.5 3:2.0\n-1\n1 2:0 3:1\n")
    assert ds.dim == 3
    assert ds.sample(0) == ({0: 0.5, 2: 2.0}, 1)
    assert ds.sample(1) == ({}, -1)
    assert ds.sample(2) == ({2: 1.0}, 1)
    again = oa3al.parse_libsvm(ds.to_libsvm(), dim=3)
    assert again.to_libsvm() == ds.to_libsvm()


def test_parse_error():
    with pytest.raises(oa3al.ParseError):
        oa3al.parse_libsvm("+1 2:1 1:1\n")


def test_rho_and_metrics():
    assert oa3al.compute_rho("sum", 10, 90) == 9.0
    m = oa3al.metrics(10, 90, 2, 9)
    assert m["sum"] == pytest.approx(0.85)
    assert m["cost"] == pytest.approx(2.7)
    assert math.isnan(oa3al.metrics(0, 5, 0, 1)["sum"])


def test_query_probability():
    assert oa3al.query_probability(0.3, 1.0, rho_max=2.0) == 1.0
    assert oa3al.query_probability(-1.5, 1.0, delta_neg=3.0, rho_max=2.0) == 0.75


def test_learner_hand_example():
    for algo in ("oa3", "oa3_diag"):
        learner = oa3al.make_learner(algo, 2, rho=2.0)
        loss, updated = learner.learn({0: 1.0}, 1)
        assert (loss, updated) == (2.0, True)
        assert learner.weights() == [1.0, 0.0]
        assert learner.variance({0: 1.0}) == 0.5
    sk = oa3al.make_learner("soa3", 2, rho=2.0, sketch_m=1)
    sk.learn({0: 1.0}, 1)
    assert sk.weights() == [1.0, 0.0]
    snap = oa3al.snapshot(sk, full=True)
    assert snap["algo"] == "soa3"


def test_run_experiment_budget_and_determinism():
    ds = oa3al.generate_synthetic(dim=10, n=500, ratio=5, offset=1.0, seed=3)
    kw = dict(algo="ssoa3", budget=40, delta_pos=10.0, sketch_m=3, seeds=[1, 2, 3])
    a = oa3al.run_experiment(ds, **kw)
    b = oa3al.run_experiment(ds, **kw)
    assert len(a["runs"]) == 3
    for ra, rb in zip(a["runs"], b["runs"]):
        assert ra["queries_used"] <= 40
        assert ra["sum"] == rb["sum"]
    assert 0.0 <= a["mean"]["sum"] <= 1.0


def test_config_error():
    ds = oa3al.generate_synthetic(dim=4, n=50, ratio=2, seed=1)
    with pytest.raises(oa3al.ConfigError):
        oa3al.run_experiment(ds, eta=-1.0)
    with pytest.raises(oa3al.ConfigError):
        oa3al.make_learner("sgd", 3)
