"""End-to-end smoke of the compiled module: one happy path per operation."""

import math

import pytest

import bulkq


def test_version_string():
    assert bulkq.__version__.count(".") == 2


def test_table_builders_and_classification():
    assert bulkq.constant_table(2) == [0, 0, 0, 0]
    assert bulkq.classify(bulkq.constant_table(3, value=1)) == "constant"

    table = bulkq.inner_product_table([1, 0, 1])
    assert bulkq.classify(table) == "balanced"
    assert bulkq.affine_table([1, 0, 1], 1) == [1 - v for v in table]

    assert bulkq.balanced_count(3) == 70
    assert len(bulkq.enumerate_balanced(2)) == 6
    assert bulkq.sample_balanced(4, seed=7) == bulkq.sample_balanced(4, seed=7)


def test_dj_signals_and_decision():
    r = bulkq.run_dj("bqc", bulkq.inner_product_table([1, 0, 1]), thermal=[0.9, 0.8, 0.7])
    assert r["decision"]["verdict"] == "balanced"
    expected = [0.8, -0.6, 0.4]
    assert all(abs(a - b) < 1e-9 for a, b in zip(r["e_site"], expected))

    c = bulkq.run_dj("bqcp", bulkq.constant_table(3))
    assert c["decision"]["verdict"] == "constant"
    assert all(abs(e + 1.0) < 1e-12 for e in c["e_site"])

    shot = bulkq.run_dj("sqc", bulkq.constant_table(3), seed=4)
    assert shot["outcome"] == [0, 0, 0]


def test_spectrum_is_normalized():
    spec = bulkq.dj_spectrum(bulkq.sample_balanced(3, seed=2))
    assert abs(sum(spec) - 1.0) < 1e-12
    assert spec[0] < 1e-14


def test_parity_recovery():
    y = [1, 0, 1, 1]
    r = bulkq.run_parity("bqc", y, thermal=[0.8] * 4)
    assert r["y_hat"] == y
    assert all(abs(m - 0.6) < 1e-9 for m in r["margins"])

    q3 = bulkq.run_qudit_parity([1, 2], 3)
    assert q3["y_hat"] == [1, 2]
    assert abs(q3["zq_grid"][0][0] - complex(-0.5, math.sqrt(3) / 2)) < 1e-9


def test_epsilon_worst_case():
    assert bulkq.epsilon_exact(2)["epsilon"] == 2.0
    assert bulkq.epsilon_exact(3)["argmin_table"] == [0, 0, 0, 1, 0, 1, 1, 1]
    sampled = bulkq.epsilon_sampled(5, 40, seed=3)
    assert sampled["epsilon"] >= 2.0 / 5.0 - 1e-10


def test_analysis_helpers():
    table = bulkq.sample_balanced(3, seed=5)
    assert bulkq.verify_fact2(table, [0.9, 0.7, 0.6]) < 1e-10
    assert bulkq.commutation_residual(table, [1, 0, 1]) < 1e-10
    rec = bulkq.sum_rule_check(table)
    assert rec["ok"]
    assert abs(rec["sum_e"] - rec["rhs"]) < 1e-10


def test_certifier():
    rep = bulkq.certify_oracle_circuit(
        bulkq.sample_balanced(2, seed=1), 2, [[0.8, 0.2], [0.6, 0.4]]
    )
    assert rep["all_pass"]
    cs = [o["c"].real for o in rep["observables"]]
    assert abs(cs[0] - 0.6) < 1e-9
    assert abs(cs[1] - 0.2) < 1e-9


def test_repetition_estimate():
    assert bulkq.estimate_repetitions(10, 1.0, 1.0, 2.0) == 400
    assert bulkq.estimate_repetitions(8, 0.75, 0.5, 2.0) == 4 * bulkq.estimate_repetitions(
        4, 0.75, 0.5, 2.0
    )


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        bulkq.run_dj("bqc", [0, 1, 1, 0])  # thermal spec required
    with pytest.raises(ValueError):
        bulkq.epsilon_exact(9)  # enumeration guard
    with pytest.raises(ValueError):
        bulkq.classify([0, 1, 1])  # not a power-of-two length
