"""Binary Gaussian Copula Synthesis: fitting, sampling and the exact bivariate maps."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .data import BinaryTable, DataError, SeedSpec
from .numerics import (
    CholeskyFactor,
    bivariate_normal_cdf,
    cholesky_psd,
    std_normal_quantile,
)

LATENT_MODES = ("pearson", "tetrachoric")


class CorrelationEstimate(NamedTuple):
    matrix: np.ndarray
    degenerate: np.ndarray  # bool per column: constant in the fitting data


def estimate_marginals(table: BinaryTable) -> np.ndarray:
    """Column means: the probability that each feature equals one."""
    if table.n_rows < 1:
        raise DataError("cannot estimate marginals of an empty table")
    return table.values.sum(axis=0, dtype=np.int64) / table.n_rows


def pearson_matrix(values: np.ndarray) -> CorrelationEstimate:
    """Pearson correlation with constant columns zeroed rather than NaN."""
    x = np.asarray(values, dtype=np.float64)
    n = x.shape[1]
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered
    var = np.diag(cov).copy()
    degenerate = var <= 1e-12 * max(1, x.shape[0])
    sd = np.sqrt(np.where(degenerate, 1.0, var))
    corr = cov / sd[:, None] / sd[None, :]
    corr[degenerate, :] = 0.0
    corr[:, degenerate] = 0.0
    corr = np.clip(0.5 * (corr + corr.T), -1.0, 1.0)
    corr[np.diag_indices(n)] = 1.0
    return CorrelationEstimate(corr, degenerate)


def estimate_correlation(table: BinaryTable) -> CorrelationEstimate:
    """Phi coefficients between binary columns."""
    if table.n_rows < 2:
        raise DataError("need at least 2 rows to estimate correlation")
    return pearson_matrix(table.values)


def gaussian_copula_cdf(u1: float, u2: float, gamma: float) -> float:
    """C(u1, u2) = Phi_2(Phi^-1(u1), Phi^-1(u2); gamma) with the boundary rules of a copula."""
    if u1 <= 0.0 or u2 <= 0.0:
        return 0.0
    if u1 >= 1.0:
        return min(u2, 1.0)
    if u2 >= 1.0:
        return u1
    return bivariate_normal_cdf(std_normal_quantile(u1), std_normal_quantile(u2), gamma)


def _check_pmf_args(p1, p2, gamma):
    if not (0.0 < p1 < 1.0 and 0.0 < p2 < 1.0):
        raise ValueError("marginal probabilities must lie strictly in (0, 1)")
    if math.isnan(gamma) or abs(gamma) > 1.0:
        raise ValueError(f"copula parameter must lie in [-1, 1], got {gamma}")


def _binary_cdf(p: float, y: int) -> float:
    # F(-1) = 0, F(0) = q, F(1) = 1
    if y < 0:
        return 0.0
    return 1.0 - p if y == 0 else 1.0


def joint_pmf_2d(p1: float, p2: float, gamma: float, y1: int, y2: int) -> float:
    """P(Y1 = y1, Y2 = y2) for Bernoulli(p1), Bernoulli(p2) joined by a Gaussian copula."""
    _check_pmf_args(p1, p2, gamma)
    if y1 not in (0, 1) or y2 not in (0, 1):
        raise ValueError("outcomes must be 0 or 1")

    def c(a, b):
        return gaussian_copula_cdf(_binary_cdf(p1, a), _binary_cdf(p2, b), gamma)

    prob = c(y1, y2) - c(y1 - 1, y2) - c(y1, y2 - 1) + c(y1 - 1, y2 - 1)
    return min(max(prob, 0.0), 1.0)


def binary_corr_from_copula(p1: float, p2: float, gamma: float) -> float:
    """Phi coefficient induced by latent correlation ``gamma``.

    Uses the covariance identity (P(1,1) - p1 p2) / sqrt(p1 q1 p2 q2).
    """
    p11 = joint_pmf_2d(p1, p2, gamma, 1, 1)
    rho = (p11 - p1 * p2) / math.sqrt(p1 * (1 - p1) * p2 * (1 - p2))
    return min(max(rho, -1.0), 1.0)


def latent_from_binary_corr(p1: float, p2: float, rho: float) -> float:
    """Invert :func:`binary_corr_from_copula` in gamma; clips to +-1 outside the attainable range."""
    lo = binary_corr_from_copula(p1, p2, -1.0)
    hi = binary_corr_from_copula(p1, p2, 1.0)
    if rho <= lo:
        return -1.0
    if rho >= hi:
        return 1.0
    return brentq(
        lambda g: binary_corr_from_copula(p1, p2, g) - rho, -1.0, 1.0, xtol=1e-10
    )


def tetrachoric_matrix(marginals: np.ndarray, binary_corr: np.ndarray, degenerate) -> np.ndarray:
    n = len(marginals)
    out = np.eye(n)
    for i in range(n):
        if degenerate[i]:
            continue
        for j in range(i + 1, n):
            if degenerate[j] or binary_corr[i, j] == 0.0:
                continue
            g = latent_from_binary_corr(marginals[i], marginals[j], binary_corr[i, j])
            out[i, j] = out[j, i] = g
    return out


@dataclass(frozen=True, eq=False)
class BgcsModel:
    marginals: np.ndarray
    latent_correlation: np.ndarray
    factor: CholeskyFactor
    feature_names: tuple[str, ...]
    degenerate: np.ndarray
    eigen_floor: float = 1e-8
    fit_row_count: int = 0
    latent_mode: str = "pearson"

    @property
    def n_features(self) -> int:
        return len(self.marginals)

    @property
    def repair_magnitude(self) -> float:
        return self.factor.repair_magnitude

    @property
    def complements(self) -> np.ndarray:
        return 1.0 - self.marginals

    def to_json(self) -> dict:
        return {
            "marginals": [float(p) for p in self.marginals],
            "correlation": [float(v) for v in self.latent_correlation.ravel()],
            "n_features": self.n_features,
            "feature_names": list(self.feature_names),
            "eigen_floor": self.eigen_floor,
            "repair_magnitude": self.repair_magnitude,
            "fit_row_count": self.fit_row_count,
            "latent_mode": self.latent_mode,
            "degenerate_features": [
                name for name, d in zip(self.feature_names, self.degenerate) if d
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BgcsModel":
        p = np.asarray(doc["marginals"], dtype=np.float64)
        n = len(p)
        corr = np.asarray(doc["correlation"], dtype=np.float64).reshape(n, n)
        names = tuple(doc.get("feature_names") or (f"x{j}" for j in range(n)))
        bad = set(doc.get("degenerate_features", ()))
        return build_model(
            p,
            corr,
            names,
            degenerate=np.array([nm in bad for nm in names]),
            eigen_floor=float(doc.get("eigen_floor", 1e-8)),
            fit_row_count=int(doc.get("fit_row_count", 0)),
            latent_mode=doc.get("latent_mode", "pearson"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "BgcsModel":
        return cls.from_json(json.loads(Path(path).read_text()))


def build_model(
    marginals,
    latent_correlation,
    feature_names=None,
    degenerate=None,
    eigen_floor: float = 1e-8,
    fit_row_count: int = 0,
    latent_mode: str = "pearson",
) -> BgcsModel:
    """Assemble a model from a known ground truth (no data needed)."""
    p = np.asarray(marginals, dtype=np.float64)
    if ((p < 0) | (p > 1)).any():
        raise ValueError("marginals must lie in [0, 1]")
    n = len(p)
    if feature_names is None:
        feature_names = tuple(f"x{j}" for j in range(n))
    if degenerate is None:
        degenerate = (p == 0.0) | (p == 1.0)
    corr = np.asarray(latent_correlation, dtype=np.float64)
    factor = cholesky_psd(corr, eigen_floor)
    return BgcsModel(
        marginals=p,
        latent_correlation=corr,
        factor=factor,
        feature_names=tuple(feature_names),
        degenerate=np.asarray(degenerate, dtype=bool),
        eigen_floor=eigen_floor,
        fit_row_count=fit_row_count,
        latent_mode=latent_mode,
    )


def fit_bgcs(table: BinaryTable, eigen_floor: float = 1e-8, latent: str = "pearson") -> BgcsModel:
    """Fit marginals and the latent correlation.

    ``latent="pearson"`` uses the phi matrix directly as the latent Sigma.
    ``latent="tetrachoric"`` instead solves, pair by pair, for the latent
    correlation whose induced phi coefficient equals the observed one.
    """
    if latent not in LATENT_MODES:
        raise ValueError(f"latent must be one of {LATENT_MODES}")
    if table.n_features < 1:
        raise DataError("table has no features")
    p = estimate_marginals(table)
    est = estimate_correlation(table)
    corr = est.matrix
    if latent == "tetrachoric":
        corr = tetrachoric_matrix(p, corr, est.degenerate)
    return build_model(
        p,
        corr,
        table.feature_names,
        degenerate=est.degenerate,
        eigen_floor=eigen_floor,
        fit_row_count=table.n_rows,
        latent_mode=latent,
    )


def sample_latent(factor: CholeskyFactor, m: int, rng: np.random.Generator) -> np.ndarray:
    """m draws from N(0, LL^T), one per row."""
    g = rng.standard_normal((m, factor.lower.shape[0]))
    return g @ factor.lower.T


def sample_bgcs(model: BgcsModel, m: int, seed: SeedSpec, label: int | None = None) -> BinaryTable:
    """Latent Gaussian -> uniform via Phi -> 1{u < p}."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    z = sample_latent(model.factor, m, seed.rng())
    u = ndtr(z)
    values = (u < model.marginals[None, :]).astype(np.uint8)
    labels = None if label is None else np.full(m, label, dtype=np.uint8)
    return BinaryTable(values, model.feature_names, labels)
