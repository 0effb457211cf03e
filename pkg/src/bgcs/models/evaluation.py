"""Seeded multi-run recall evaluation across models and augmenters."""

from __future__ import annotations

import csv
import json
import statistics
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..augment import AUGMENTERS, augment_to_balance
from ..data import BinaryTable, SeedSpec, stratified_split
from .forest import predict_forest, train_forest
from .logreg import predict_logreg, train_logreg
from .metrics import accuracy, confusion, precision, recall
from .tree import TreeConfig, predict_tree, train_tree

MODELS = ("decision-tree", "random-forest", "logistic-regression")


@dataclass
class ModelParams:
    tree: TreeConfig = field(default_factory=TreeConfig)
    n_trees: int = 100
    features_per_split: int | None = None
    l2: float = 0.0
    learning_rate: float = 0.1
    max_iters: int = 5000
    tol: float = 1e-6


def fit_predict(model: str, train: BinaryTable, test: BinaryTable, params: ModelParams,
                seed: SeedSpec) -> np.ndarray:
    if model == "decision-tree":
        return predict_tree(train_tree(train, params.tree), test)["labels"]
    if model == "random-forest":
        forest = train_forest(train, params.n_trees, params.features_per_split, params.tree, seed)
        return predict_forest(forest, test)
    if model == "logistic-regression":
        lr = train_logreg(train, params.l2, params.learning_rate, params.max_iters, params.tol)
        return predict_logreg(lr, test)
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


def quartiles(values) -> tuple[float, float, float]:
    """(Q1, median, Q3), halves taken excluding the median for odd counts."""
    s = sorted(values)
    n = len(s)
    if n == 0:
        raise ValueError("no values")
    med = statistics.median(s)
    if n == 1:
        return med, med, med
    lower, upper = s[: n // 2], s[(n + 1) // 2:]
    return statistics.median(lower), med, statistics.median(upper)


@dataclass
class EvalSummary:
    models: tuple
    augmenters: tuple
    n_runs: int
    records: list  # one dict per (run, model, augmenter)
    config: dict = field(default_factory=dict)

    def recalls(self, model: str, augmenter: str) -> list[float]:
        return [r["recall"] for r in self.records
                if r["model"] == model and r["augmenter"] == augmenter and r["recall"] is not None]

    def errors(self) -> list[dict]:
        return [r for r in self.records if r.get("error")]

    def cell(self, model: str, augmenter: str) -> dict:
        vals = self.recalls(model, augmenter)
        if not vals:
            return {"recalls": [], "median": None, "mean": None, "q1": None, "q3": None, "iqr": None}
        q1, med, q3 = quartiles(vals)
        return {"recalls": vals, "median": med, "mean": statistics.fmean(vals),
                "q1": q1, "q3": q3, "iqr": q3 - q1}

    def median(self, model: str, augmenter: str) -> float | None:
        return self.cell(model, augmenter)["median"]

    def improvement(self, model: str, augmenter: str) -> float | None:
        """Relative median-recall change over the "none" baseline, in percent."""
        base = self.median(model, "none")
        cur = self.median(model, augmenter)
        if base is None or cur is None or base == 0:
            return None
        return 100.0 * (cur - base) / base

    def to_json(self) -> dict:
        cells = []
        for m in self.models:
            for a in self.augmenters:
                c = self.cell(m, a)
                c.update(model=m, augmenter=a, improvement_pct=self.improvement(m, a))
                cells.append(c)
        return {"n_runs": self.n_runs, "models": list(self.models),
                "augmenters": list(self.augmenters), "config": self.config,
                "cells": cells, "errors": self.errors()}

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["run", "model", "augmenter", "recall"])
            for r in self.records:
                w.writerow([r["run"], r["model"], r["augmenter"],
                            "" if r["recall"] is None else repr(r["recall"])])


def multi_run_eval(dataset: BinaryTable, models=MODELS, augmenters=("none", "bgcs"),
                   n_runs: int = 25, test_fraction: float = 0.25, target_ratio: float = 1.0,
                   seed: SeedSpec = SeedSpec(), params: ModelParams | None = None,
                   augment_options: dict | None = None, progress=None) -> EvalSummary:
    """Split per run, augment the training split only, score recall on the untouched test split."""
    params = params or ModelParams()
    augment_options = augment_options or {}
    augmenters = tuple(augmenters)
    if "none" not in augmenters:
        augmenters = ("none",) + augmenters
    for a in augmenters:
        if a not in AUGMENTERS:
            raise ValueError(f"unknown augmenter {a!r}")
    records = []
    for run in range(n_runs):
        train, test = stratified_split(dataset, test_fraction, seed.child(run, 0))
        actual = test.require_labels()
        for ai, aug in enumerate(augmenters):
            try:
                aug_train = augment_to_balance(train, aug, target_ratio, seed.child(run, 1, ai),
                                               **augment_options.get(aug, {}))
            except Exception as exc:  # noqa: BLE001 - reported per cell
                for m in models:
                    records.append(_failed(run, m, aug, exc, test))
                continue
            for mi, m in enumerate(models):
                try:
                    pred = fit_predict(m, aug_train, test, params, seed.child(run, 2, ai, mi))
                except Exception as exc:  # noqa: BLE001
                    records.append(_failed(run, m, aug, exc, test))
                    continue
                cm = confusion(pred, actual)
                records.append({
                    "run": run, "model": m, "augmenter": aug,
                    "recall": recall(cm), "precision": precision(cm), "accuracy": accuracy(cm),
                    "confusion": [cm.tp, cm.fp, cm.fn, cm.tn],
                    "train_rows": aug_train.n_rows, "test_digest": test.digest(), "error": None,
                })
            if progress:
                progress(run, aug)
    cfg = {"test_fraction": test_fraction, "target_ratio": target_ratio,
           "master_seed": seed.master_seed, "stream_index": seed.stream_index}
    return EvalSummary(tuple(models), augmenters, n_runs, records, cfg)


def _failed(run, model, aug, exc, test) -> dict:
    return {"run": run, "model": model, "augmenter": aug, "recall": None, "precision": None,
            "accuracy": None, "confusion": None, "train_rows": None,
            "test_digest": test.digest(),
            "error": "".join(traceback.format_exception_only(type(exc), exc)).strip()}
