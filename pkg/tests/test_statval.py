import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bgcs.data import BinaryTable, DataError
from bgcs.statval import (DEFAULT_ALPHAS, DISSIMILAR, SIMILAR, correlation_fidelity,
                          count_ones, critical_value, feature_test_suite, pca_overlay,
                          two_proportion_ztest, univariate_summary)

# mpmath oracle values
WORKED_Z = -1.4213381090374029
WORKED_P = 0.15521848968468402
POWER_Z = -13.483997249264840


def test_worked_example():
    r = two_proportion_ztest(50, 100, 60, 100)
    assert r.z == pytest.approx(WORKED_Z, abs=1e-12)
    assert r.p_value == pytest.approx(WORKED_P, abs=1e-12)
    assert r.pooled_p == pytest.approx(0.55)
    r.judge(DEFAULT_ALPHAS)
    assert all(v == SIMILAR for v in r.verdicts.values())


def test_large_difference_rejected_everywhere():
    r = two_proportion_ztest(300, 1000, 600, 1000).judge(DEFAULT_ALPHAS)
    assert r.z == pytest.approx(POWER_Z, abs=1e-10)
    assert all(v == DISSIMILAR for v in r.verdicts.values())


def test_degenerate_cases():
    r = two_proportion_ztest(0, 50, 0, 80)
    assert r.degenerate and r.z == 0.0 and r.p_value == 1.0
    r = two_proportion_ztest(10, 10, 20, 20)
    assert r.degenerate and r.z == 0.0
    with pytest.raises(ValueError):
        two_proportion_ztest(5, 0, 1, 10)
    with pytest.raises(ValueError):
        two_proportion_ztest(11, 10, 1, 10)


def test_critical_values():
    assert critical_value(0.05) == pytest.approx(1.959963984540054, abs=1e-12)
    assert critical_value(0.10) == pytest.approx(1.6448536269514722, abs=1e-12)
    with pytest.raises(ValueError):
        critical_value(0.0)


counts = st.integers(1, 400).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n)))


@given(counts, counts)
def test_antisymmetric_and_valid_p(a, b):
    (n1, x1), (n2, x2) = a, b
    r = two_proportion_ztest(x1, n1, x2, n2)
    s = two_proportion_ztest(x2, n2, x1, n1)
    assert r.z == pytest.approx(-s.z, abs=1e-12)
    assert 0.0 <= r.p_value <= 1.0
    assert r.p_value == pytest.approx(s.p_value, abs=1e-12)


@given(counts, counts)
def test_verdicts_monotone_in_alpha(a, b):
    (n1, x1), (n2, x2) = a, b
    r = two_proportion_ztest(x1, n1, x2, n2).judge(DEFAULT_ALPHAS)
    # a feature rejected at a small alpha is rejected at every larger alpha
    ordered = [r.verdicts[a] for a in sorted(DEFAULT_ALPHAS)]
    first = next((i for i, v in enumerate(ordered) if v == DISSIMILAR), len(ordered))
    assert all(v == DISSIMILAR for v in ordered[first:])


def _table(x, names=None):
    x = np.asarray(x)
    return BinaryTable(x, names or tuple(f"v{j}" for j in range(x.shape[1])),
                       binary=bool(np.isin(x, (0, 1)).all()))


def test_suite_counts_and_rows():
    rng = np.random.default_rng(1)
    real = _table((rng.random((300, 10)) < 0.3).astype(np.uint8))
    syn = _table((rng.random((500, 10)) < 0.3).astype(np.uint8))
    s = feature_test_suite(real, syn, DEFAULT_ALPHAS)
    assert s.n_similar + s.n_dissimilar == 60
    rows = s.table_rows()
    assert set(rows) == {"Z-Statistic Range", "Z-Statistic Mean", "Z-Statistic Std",
                         "P-Value Range", "P-value Mean", "P-value Std",
                         "Number of Dissimilar Instances", "Number of Similar Instances"}
    assert sum(s.similar_by_alpha().values()) == s.n_similar


def test_fractional_cells_are_not_ones():
    t = _table(np.array([[0.4, 1.0], [1.0, 0.7], [0.0, 1.0]]))
    np.testing.assert_array_equal(count_ones(t), [1, 2])


def test_feature_mismatch():
    a = _table(np.zeros((3, 2), dtype=np.uint8), ("a", "b"))
    b = _table(np.zeros((3, 2), dtype=np.uint8), ("a", "c"))
    with pytest.raises(DataError):
        feature_test_suite(a, b, DEFAULT_ALPHAS)


def test_univariate_and_fidelity_identical_tables():
    rng = np.random.default_rng(2)
    x = (rng.random((100, 5)) < 0.4).astype(np.uint8)
    x[:, 4] = 0
    t = _table(x)
    for rec in univariate_summary(t, t):
        assert rec["abs_diff"] == 0
    fid = correlation_fidelity(t, t)
    assert fid["max_abs_dev"] == 0.0
    assert "v4" in fid["excluded"]


def test_pca_overlay(tmp_path):
    rng = np.random.default_rng(4)
    real = _table((rng.random((50, 6)) < 0.5).astype(np.uint8))
    syn = _table((rng.random((70, 6)) < 0.5).astype(np.uint8))
    ov = pca_overlay(real, syn)
    path = tmp_path / "ov.csv"
    ov.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,source"
    assert len(lines) == 121
    assert math.isfinite(sum(ov.explained_variance))
