import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bgcs.data import (BinaryTable, DataError, SeedSpec, class_balance, concat_tables,
                       load_csv, save_csv, stratified_split)


def test_table_validation():
    with pytest.raises(DataError):
        BinaryTable(np.array([[0, 2]]), ("a", "b"))
    with pytest.raises(DataError):
        BinaryTable(np.zeros((2, 2)), ("a",))
    with pytest.raises(DataError):
        BinaryTable(np.zeros((2, 2)), ("a", "a"))
    with pytest.raises(DataError):
        BinaryTable(np.zeros((2, 2)), ("a", "b"), labels=[0, 1, 1])
    with pytest.raises(DataError):
        BinaryTable(np.zeros((2, 2)), ("a", "b"), labels=[0, 3])
    with pytest.raises(DataError):
        BinaryTable(np.array([[0.5, np.inf]]), ("a", "b"), binary=False)


def test_table_is_immutable():
    t = BinaryTable(np.zeros((2, 2)), ("a", "b"), [0, 1])
    with pytest.raises(ValueError):
        t.values[0, 0] = 1
    with pytest.raises(ValueError):
        t.labels[0] = 1


def test_csv_round_trip(tmp_path):
    t = BinaryTable(np.array([[0, 1, 1], [1, 0, 0]]), ("a", "b", "c"), [1, 0])
    p = tmp_path / "t.csv"
    save_csv(t, p)
    assert p.read_text() == "a,b,c,label\n0,1,1,1\n1,0,0,0\n"
    back = load_csv(p, label_column="label")
    assert back.digest() == t.digest()


def test_csv_errors_name_location(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n0,1\n1,x\n")
    with pytest.raises(DataError, match=r"row 2, col b"):
        load_csv(p)
    p.write_text("a,b\n0,\n")
    with pytest.raises(DataError, match="missing"):
        load_csv(p)
    assert load_csv(p, missing_as_zero=True).values.tolist() == [[0, 0]]
    p.write_text("a,a\n0,1\n")
    with pytest.raises(DataError, match="duplicate"):
        load_csv(p)
    p.write_text("a,b\n0,1,1\n")
    with pytest.raises(DataError, match="row 1"):
        load_csv(p)
    with pytest.raises(DataError):
        load_csv(tmp_path / "missing.csv")
    p.write_text("a,b\n0,1\n")
    with pytest.raises(DataError, match="label"):
        load_csv(p, label_column="y")


def test_concat_rules():
    a = BinaryTable(np.zeros((2, 2)), ("a", "b"), [0, 1])
    b = BinaryTable(np.ones((1, 2)), ("a", "b"), [1])
    c = concat_tables([a, b])
    assert c.n_rows == 3 and c.labels.tolist() == [0, 1, 1]
    with pytest.raises(DataError):
        concat_tables([a, BinaryTable(np.ones((1, 2)), ("a", "c"), [1])])
    with pytest.raises(DataError):
        concat_tables([a, b.without_labels()])
    frac = BinaryTable(np.array([[0.25, 0.5]]), ("a", "b"), [1], binary=False)
    mixed = concat_tables([a, frac])
    assert not mixed.binary and mixed.values[2, 0] == 0.25


def test_seed_streams_are_independent_and_reproducible():
    s = SeedSpec(1, 0)
    assert s.rng().integers(0, 2**62) == SeedSpec(1, 0).rng().integers(0, 2**62)
    draws = {s.rng().integers(0, 2**62), s.stream(1).rng().integers(0, 2**62),
             s.child(0).rng().integers(0, 2**62), s.rng(0).integers(0, 2**62),
             SeedSpec(2, 0).rng().integers(0, 2**62)}
    assert len(draws) == 4  # child(0) and rng(0) name the same stream by design
    assert s.child(3).rng(4).random() == s.child(3, 4).rng().random()
    with pytest.raises(ValueError):
        SeedSpec(1, -1)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 200), st.integers(2, 40), st.floats(0.1, 0.5), st.integers(0, 10**6))
def test_stratified_split_properties(n_neg, n_pos, frac, master):
    labels = np.r_[np.zeros(n_neg), np.ones(n_pos)].astype(np.uint8)
    x = np.arange(n_neg + n_pos)[:, None] % 2
    t = BinaryTable(x, ("a",), labels)
    train, test = stratified_split(t, frac, SeedSpec(master))
    assert train.n_rows + test.n_rows == t.n_rows
    for cls, n in ((0, n_neg), (1, n_pos)):
        assert int((test.labels == cls).sum()) == int(np.floor(n * frac + 0.5))
    again = stratified_split(t, frac, SeedSpec(master))
    assert again[1].digest() == test.digest()


def test_split_needs_two_per_class():
    t = BinaryTable(np.zeros((4, 1)), ("a",), [0, 0, 0, 1])
    with pytest.raises(DataError):
        stratified_split(t, 0.25, SeedSpec())


def test_class_balance():
    b = class_balance(BinaryTable(np.zeros((4, 1)), ("a",), [0, 1, 1, 0]))
    assert (b.n_positive, b.n_negative, b.ratio) == (2, 2, 0.5)
