"""Bagged CART forest with per-node feature subsampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..data import BinaryTable, DataError, SeedSpec
from .tree import TrainedTree, TreeConfig, grow_tree, leaf_probabilities


@dataclass
class Forest:
    trees: list[TrainedTree]
    features_per_split: int
    feature_names: tuple[str, ...]

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def train_forest(train: BinaryTable, n_trees: int = 100, features_per_split: int | None = None,
                 config: TreeConfig = TreeConfig(), seed: SeedSpec = SeedSpec()) -> Forest:
    labels = train.require_labels()
    if train.n_rows < 2:
        raise DataError("need at least 2 rows to train a forest")
    n = train.n_features
    fps = features_per_split or max(1, math.isqrt(n))
    if not 1 <= fps <= n:
        raise ValueError(f"features_per_split must be in [1, {n}]")
    trees = []
    for t in range(n_trees):
        rng = seed.rng(t)
        boot = rng.integers(0, train.n_rows, size=train.n_rows)

        def sampler():
            return np.sort(rng.choice(n, size=fps, replace=False))

        root, log = grow_tree(train.values[boot], labels[boot], config,
                              feature_sampler=None if fps == n else sampler)
        trees.append(TrainedTree(root, config, train.feature_names, train.n_rows, log))
    return Forest(trees, fps, train.feature_names)


def predict_forest(forest: Forest, rows: BinaryTable | np.ndarray) -> np.ndarray:
    """Majority vote of tree labels; a tied vote goes to the positive class."""
    x = rows.values if isinstance(rows, BinaryTable) else np.asarray(rows)
    if x.shape[1] != len(forest.feature_names):
        raise DataError("feature count does not match the forest")
    votes = np.zeros(len(x))
    for tree in forest.trees:
        votes += leaf_probabilities(tree.root, x) > tree.config.decision_threshold
    return (2 * votes >= forest.n_trees).astype(np.uint8)
