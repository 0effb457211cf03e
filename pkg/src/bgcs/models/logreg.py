"""L2-regularised logistic regression fitted by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, log_expit

from ..data import BinaryTable


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    n_iter: int = 0
    converged: bool = False
    loss_history: list = field(default_factory=list, repr=False)

    def probabilities(self, x) -> np.ndarray:
        return expit(np.asarray(x, dtype=np.float64) @ self.weights + self.bias)


def logreg_loss(w, b, x, y, l2: float = 0.0) -> float:
    """Mean cross-entropy plus (l2 / 2) * ||w||^2."""
    s = x @ w + b
    ce = -(y * log_expit(s) + (1.0 - y) * log_expit(-s)).mean()
    return float(ce + 0.5 * l2 * (w @ w))


def logreg_gradient(w, b, x, y, l2: float = 0.0):
    r = expit(x @ w + b) - y
    return x.T @ r / len(y) + l2 * w, float(r.mean())


def train_logreg(train: BinaryTable, l2: float = 0.0, learning_rate: float = 0.1,
                 max_iters: int = 5000, tol: float = 1e-6,
                 track_loss: bool = False) -> LogisticModel:
    if l2 < 0:
        raise ValueError("l2 must be nonnegative")
    x = train.float_values()
    y = train.require_labels().astype(np.float64)
    w = np.zeros(x.shape[1])
    b = 0.0
    history = []
    converged = False
    it = 0
    for it in range(max_iters):
        gw, gb = logreg_gradient(w, b, x, y, l2)
        if max(np.abs(gw).max(initial=0.0), abs(gb)) <= tol:
            converged = True
            break
        if track_loss:
            history.append(logreg_loss(w, b, x, y, l2))
        w = w - learning_rate * gw
        b = b - learning_rate * gb
    else:
        it = max_iters
    if track_loss:
        history.append(logreg_loss(w, b, x, y, l2))
    return LogisticModel(w, b, it, converged, history)


def predict_logreg(model: LogisticModel, rows: BinaryTable | np.ndarray) -> np.ndarray:
    x = rows.float_values() if isinstance(rows, BinaryTable) else rows
    return (model.probabilities(x) > 0.5).astype(np.uint8)
