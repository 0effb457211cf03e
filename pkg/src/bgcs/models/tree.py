"""CART classification tree on binary (or 0.5-thresholded) features, Gini criterion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..data import BinaryTable, DataError

THRESHOLD = 0.5
_TIE_EPS = 1e-12


def gini_impurity(n_pos: int, n_neg: int) -> float:
    total = n_pos + n_neg
    if total < 1:
        raise ValueError("gini impurity of an empty node is undefined")
    p = n_pos / total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int | None = 6
    min_samples_leaf: int = 5
    decision_threshold: float = 0.5

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be nonnegative or None")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be at least 1")


@dataclass
class TreeNode:
    """Internal when ``feature`` is set; rows with x <= 0.5 go left."""

    sample_count: int
    n_positive: int
    gini: float
    feature: int | None = None
    threshold: float = THRESHOLD
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def class1_probability(self) -> float:
        return self.n_positive / self.sample_count

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)


@dataclass
class TrainedTree:
    root: TreeNode
    config: TreeConfig
    feature_names: tuple[str, ...]
    n_train: int
    split_log: list = field(default_factory=list, repr=False)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def depth(self, node: TreeNode | None = None) -> int:
        node = node or self.root
        if node.is_leaf:
            return 0
        return 1 + max(self.depth(node.left), self.depth(node.right))

    def leaves(self) -> list[TreeNode]:
        return [n for n in self.root.iter_nodes() if n.is_leaf]


def _child_gini(n: np.ndarray, pos: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, pos / np.maximum(n, 1), 0.0)
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split(xb, y, idx, node, min_leaf, features):
    n = node.sample_count
    sub = xb[idx] if features is None else xb[np.ix_(idx, features)]
    right_n = sub.sum(axis=0)
    right_pos = y[idx] @ sub
    left_n = n - right_n
    left_pos = node.n_positive - right_pos
    valid = (left_n >= min_leaf) & (right_n >= min_leaf)
    if not valid.any():
        return None
    weighted = (left_n * _child_gini(left_n, left_pos) + right_n * _child_gini(right_n, right_pos)) / n
    decrease = np.where(valid, node.gini - weighted, -np.inf)
    best = int(np.flatnonzero(decrease >= decrease.max() - _TIE_EPS)[0])
    feat = best if features is None else int(features[best])
    return feat, float(decrease[best]), float(weighted[best])


def grow_tree(x: np.ndarray, y: np.ndarray, config: TreeConfig,
              feature_sampler: Callable[[], np.ndarray] | None = None):
    """Greedy depth-first growth; returns (root, split_log).

    ``feature_sampler`` returns the candidate feature indices (sorted) for a
    node; ``None`` means all features.
    """
    xb = (np.asarray(x) > THRESHOLD).astype(np.float64)
    y = np.asarray(y, dtype=np.float64)
    log = []

    def grow(idx, depth):
        n = len(idx)
        n_pos = int(round(y[idx].sum()))
        node = TreeNode(n, n_pos, gini_impurity(n_pos, n - n_pos))
        if (
            n_pos == 0
            or n_pos == n
            or (config.max_depth is not None and depth >= config.max_depth)
            or n < 2 * config.min_samples_leaf
        ):
            return node
        features = None if feature_sampler is None else feature_sampler()
        found = _best_split(xb, y, idx, node, config.min_samples_leaf, features)
        if found is None:
            return node
        feat, decrease, weighted = found
        # impurity is concave, so a split can never raise the weighted Gini
        assert weighted <= node.gini + 1e-12, "split increased weighted Gini"
        log.append((feat, n, decrease))
        go_right = xb[idx, feat] > 0
        node.feature = feat
        node.left = grow(idx[~go_right], depth + 1)
        node.right = grow(idx[go_right], depth + 1)
        return node

    root = grow(np.arange(len(y)), 0)
    return root, log


def train_tree(train: BinaryTable, config: TreeConfig = TreeConfig()) -> TrainedTree:
    labels = train.require_labels()
    if train.n_rows < 2:
        raise DataError("need at least 2 rows to train a tree")
    root, log = grow_tree(train.values, labels, config)
    return TrainedTree(root, config, train.feature_names, train.n_rows, log)


def leaf_probabilities(root: TreeNode, x: np.ndarray) -> np.ndarray:
    out = np.empty(len(x))
    stack = [(root, np.arange(len(x)))]
    while stack:
        node, idx = stack.pop()
        if node.is_leaf:
            out[idx] = node.class1_probability
            continue
        right = x[idx, node.feature] > node.threshold
        stack.append((node.left, idx[~right]))
        stack.append((node.right, idx[right]))
    return out


def predict_tree(tree: TrainedTree, rows: BinaryTable | np.ndarray) -> dict:
    x = rows.values if isinstance(rows, BinaryTable) else np.asarray(rows)
    if x.ndim != 2 or x.shape[1] != tree.n_features:
        raise DataError(
            f"expected {tree.n_features} features, got {x.shape[-1] if x.ndim else 0}"
        )
    proba = leaf_probabilities(tree.root, x)
    return {
        "probabilities": proba,
        "labels": (proba > tree.config.decision_threshold).astype(np.uint8),
    }
