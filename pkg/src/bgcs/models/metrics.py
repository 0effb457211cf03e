"""Confusion matrix and the precision / recall / accuracy trio.

Undefined ratios (zero denominators) come back as ``None``, never 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(predicted, actual) -> ConfusionMatrix:
    pred = np.asarray(predicted).astype(bool)
    act = np.asarray(actual).astype(bool)
    if pred.shape != act.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {act.shape}")
    return ConfusionMatrix(
        tp=int((pred & act).sum()),
        fp=int((pred & ~act).sum()),
        fn=int((~pred & act).sum()),
        tn=int((~pred & ~act).sum()),
    )


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def precision(cm: ConfusionMatrix) -> float | None:
    return _ratio(cm.tp, cm.tp + cm.fp)


def recall(cm: ConfusionMatrix) -> float | None:
    return _ratio(cm.tp, cm.tp + cm.fn)


def accuracy(cm: ConfusionMatrix) -> float | None:
    return _ratio(cm.tp + cm.tn, cm.total)
