import itertools

import jsonschema
import numpy as np
import pytest

from bgcs.cdss import (DISCLAIMER, GT, LE, REPORT_SCHEMA, emit_cdss_report, extract_rules,
                       feature_importance, predict_with_rules, render_report, write_report)
from bgcs.data import BinaryTable, SeedSpec
from bgcs.models import TreeConfig, predict_tree, train_forest, train_tree


def _tree(n_feat, seed, depth=None):
    rng = np.random.default_rng(seed)
    x = (rng.random((400, n_feat)) < 0.5).astype(np.uint8)
    y = ((x[:, 0] & x[:, 1 % n_feat]) | (rng.random(400) < 0.2)).astype(np.uint8)
    t = BinaryTable(x, tuple(f"f{j}" for j in range(n_feat)), y)
    return train_tree(t, TreeConfig(max_depth=depth, min_samples_leaf=3)), t


@pytest.mark.parametrize("n_feat", [1, 3, 7, 12])
def test_rules_match_tree_on_every_input(n_feat):
    tree, _ = _tree(n_feat, n_feat)
    rules = extract_rules(tree)
    assert len(rules) == len(tree.leaves())
    grid = np.array(list(itertools.product((0, 1), repeat=n_feat)), dtype=np.uint8)
    np.testing.assert_array_equal(predict_with_rules(rules, tree.feature_names, grid),
                                  predict_tree(tree, grid)["probabilities"])


def test_rule_text():
    tree, _ = _tree(3, 0, depth=1)
    rules = extract_rules(tree)
    assert [c[1] for c in rules[0].conditions] == [LE]
    assert [c[1] for c in rules[1].conditions] == [GT]
    assert rules[0].describe().startswith("IF f")


def test_importance_normalised_and_ordered():
    tree, t = _tree(8, 5, depth=4)
    ranking = feature_importance(tree)
    scores = [s for _, s in ranking]
    assert sum(scores) == pytest.approx(1.0, abs=1e-12)
    assert scores == sorted(scores, reverse=True)
    assert ranking[0][0] in ("f0", "f1")
    forest = train_forest(t, 10, seed=SeedSpec(1))
    assert sum(s for _, s in feature_importance(forest)) == pytest.approx(1.0, abs=1e-12)


def test_trivial_tree_report():
    t = BinaryTable(np.zeros((10, 2)), ("a", "b"), np.ones(10))
    tree = train_tree(t)
    report = emit_cdss_report(tree, feature_importance(tree))
    assert report["importance"] == [] and report["model_card"]["trivial"]
    assert "no splits" in render_report(report)
    jsonschema.validate(report, REPORT_SCHEMA)


def test_report_schema_and_files(tmp_path):
    tree, _ = _tree(6, 2, depth=3)
    report = emit_cdss_report(tree, feature_importance(tree), top_k=3)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert len(report["importance"]) <= 3
    probs = [r["probability"] for r in report["rules"]]
    assert probs == sorted(probs, reverse=True)
    assert report["disclaimer"] == DISCLAIMER
    write_report(report, tmp_path / "r.json", tmp_path / "r.txt")
    text = (tmp_path / "r.txt").read_text()
    assert DISCLAIMER in text and "Rules, highest risk first" in text


def test_broken_rule_table_detected():
    tree, _ = _tree(3, 1, depth=2)
    rules = extract_rules(tree)[:-1]
    grid = np.array(list(itertools.product((0, 1), repeat=3)))
    with pytest.raises(AssertionError):
        predict_with_rules(rules, tree.feature_names, grid)
