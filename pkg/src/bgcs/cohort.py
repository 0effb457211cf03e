"""Parameterised synthetic cohort standing in for a private binary EHR extract."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .copula import build_model, sample_bgcs
from .data import BinaryTable, DataError, SeedSpec

DEFAULT_ROWS = 4328
DEFAULT_FEATURES = 161
DEFAULT_MINORITY_RATIO = 0.05
RATIO_TOLERANCE = 0.005


@dataclass
class GroundTruth:
    marginals: np.ndarray
    correlation: np.ndarray
    weights: np.ndarray
    bias: float = 0.0
    minority_ratio: float = DEFAULT_MINORITY_RATIO
    seed: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        n = len(self.marginals)
        return {
            "n_features": n,
            "marginals": [float(v) for v in self.marginals],
            "correlation": [float(v) for v in np.asarray(self.correlation).ravel()],
            "weights": [float(v) for v in self.weights],
            "bias": float(self.bias),
            "minority_ratio": float(self.minority_ratio),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GroundTruth":
        n = int(doc["n_features"])
        return cls(
            marginals=np.asarray(doc["marginals"], dtype=np.float64),
            correlation=np.asarray(doc["correlation"], dtype=np.float64).reshape(n, n),
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=float(doc["bias"]),
            minority_ratio=float(doc["minority_ratio"]),
            seed=dict(doc.get("seed", {})),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


def default_ground_truth(n_features: int, seed: SeedSpec, n_factors: int = 8,
                         n_informative: int = 16) -> GroundTruth:
    """Sparse EHR-like marginals, a factor-model latent correlation and a sparse logistic rule."""
    rng = seed.rng(2)
    marginals = np.clip(rng.beta(1.2, 6.0, size=n_features), 0.02, 0.6)

    n_factors = max(1, min(n_factors, n_features))
    loadings = np.zeros((n_features, n_factors))
    for j in range(n_features):
        k = rng.choice(n_factors, size=min(2, n_factors), replace=False)
        loadings[j, k] = rng.uniform(0.25, 0.6, size=len(k)) * rng.choice([1, 1, 1, -1], size=len(k))
    corr = loadings @ loadings.T
    np.fill_diagonal(corr, 1.0)

    weights = np.zeros(n_features)
    n_inf = min(n_informative, n_features)
    idx = rng.choice(n_features, size=n_inf, replace=False)
    signs = np.where(np.arange(n_inf) % 4 == 3, -1.0, 1.0)
    weights[idx] = signs * rng.uniform(0.8, 2.0, size=n_inf)
    return GroundTruth(marginals, corr, weights, seed={"master_seed": seed.master_seed,
                                                      "stream_index": seed.stream_index})


def _tune_bias(logits: np.ndarray, uniforms: np.ndarray, target: float) -> float:
    lo, hi = -60.0, 60.0
    best, best_err = 0.0, np.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        ratio = float(np.mean(uniforms < expit(logits + mid)))
        err = abs(ratio - target)
        if err < best_err:
            best, best_err = mid, err
        if err <= RATIO_TOLERANCE / 4 or hi - lo < 1e-12:
            break
        if ratio < target:
            lo = mid
        else:
            hi = mid
    if best_err > RATIO_TOLERANCE:
        raise DataError(f"could not reach minority ratio {target} (closest miss {best_err:.4f})")
    return best


def generate_synthetic_cohort(
    n_rows: int = DEFAULT_ROWS,
    n_features: int = DEFAULT_FEATURES,
    minority_ratio: float = DEFAULT_MINORITY_RATIO,
    seed: SeedSpec = SeedSpec(),
    truth: GroundTruth | None = None,
) -> tuple[BinaryTable, GroundTruth]:
    """Draw features through the BGCS pipeline, then logistic labels with a bisected bias.

    Returns the table and the ground truth (with the tuned bias filled in).
    """
    if not 0.0 < minority_ratio < 1.0:
        raise DataError("minority_ratio must lie strictly between 0 and 1")
    if n_rows < 2 or n_features < 1:
        raise DataError("need at least 2 rows and 1 feature")
    if truth is None:
        truth = default_ground_truth(n_features, seed)
    if len(truth.marginals) != n_features or len(truth.weights) != n_features:
        raise DataError("ground truth does not match n_features")
    if ((truth.marginals <= 0) | (truth.marginals >= 1)).any():
        raise DataError("cohort marginals must lie strictly in (0, 1)")

    names = tuple(f"f{j:03d}" for j in range(n_features))
    model = build_model(truth.marginals, truth.correlation, names)
    x = sample_bgcs(model, n_rows, seed).values
    logits = x.astype(np.float64) @ truth.weights
    uniforms = seed.rng(1).random(n_rows)
    bias = _tune_bias(logits, uniforms, minority_ratio)
    labels = (uniforms < expit(logits + bias)).astype(np.uint8)
    truth = GroundTruth(
        truth.marginals, truth.correlation, truth.weights, bias, minority_ratio,
        {"master_seed": seed.master_seed, "stream_index": seed.stream_index},
    )
    return BinaryTable(x, names, labels), truth
