"""Competing augmenters: SMOTE, empirical-marginal Gaussian copula, random oversampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import rankdata

from .copula import pearson_matrix, sample_latent
from .data import BinaryTable, DataError, SeedSpec
from .numerics import cholesky_psd


@dataclass(frozen=True)
class SmoteConfig:
    """``amount`` as an int is an exact row count, as a float a multiple of the minority size."""

    k: int = 5
    output_mode: str = "fractional"
    amount: int | float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.output_mode not in ("fractional", "binarized"):
            raise ValueError("output_mode must be 'fractional' or 'binarized'")
        if self.amount < 0:
            raise ValueError("amount must be nonnegative")

    def n_samples(self, minority_size: int) -> int:
        if isinstance(self.amount, (int, np.integer)) and not isinstance(self.amount, bool):
            return int(self.amount)
        return int(round(self.amount * minority_size))


def _squared_distances(x: np.ndarray) -> np.ndarray:
    sq = (x * x).sum(axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    return np.maximum(d, 0.0)


def knn_minority(minority: BinaryTable, index: int, k: int) -> np.ndarray:
    """k nearest rows to ``index`` by squared Euclidean distance; ties go to the lower index."""
    x = minority.float_values()
    if not 1 <= k < len(x):
        raise ValueError(f"need 1 <= k < {len(x)} rows, got k={k}")
    d = ((x - x[index]) ** 2).sum(axis=1)
    d[index] = np.inf
    return np.argsort(d, kind="stable")[:k]


def _all_neighbours(x: np.ndarray, k: int) -> np.ndarray:
    d = _squared_distances(x)
    np.fill_diagonal(d, np.inf)
    return np.argsort(d, axis=1, kind="stable")[:, :k]


def binarize(values: np.ndarray) -> np.ndarray:
    """Threshold at 0.5 with exact halves going to one."""
    return (np.asarray(values) >= 0.5).astype(np.uint8)


def smote_generate(minority: BinaryTable, config: SmoteConfig, seed: SeedSpec,
                   n: int | None = None) -> BinaryTable:
    """Interpolate between minority rows and one of their k nearest minority neighbours.

    Base rows are visited round-robin so each minority sample is used equally.
    """
    l = minority.n_rows
    if config.k >= l:
        raise DataError(f"SMOTE needs more than k={config.k} minority rows, got {l}")
    m = config.n_samples(l) if n is None else int(n)
    x = minority.float_values()
    rng = seed.rng()
    base = np.arange(m) % l
    nbrs = _all_neighbours(x, config.k)
    pick = nbrs[base, rng.integers(0, config.k, size=m)]
    gap = rng.random(m)
    synth = x[base] + gap[:, None] * (x[pick] - x[base])
    labels = None if not minority.has_labels else np.ones(m, dtype=np.uint8)
    if config.output_mode == "binarized":
        return BinaryTable(binarize(synth), minority.feature_names, labels)
    return BinaryTable(synth, minority.feature_names, labels, binary=False)


@dataclass(frozen=True)
class EmpiricalMarginal:
    support: np.ndarray     # sorted distinct values
    cumulative: np.ndarray  # F(v) at each support point, strictly increasing to 1

    @classmethod
    def fit(cls, column) -> "EmpiricalMarginal":
        vals, counts = np.unique(np.asarray(column, dtype=np.float64), return_counts=True)
        return cls(vals, np.cumsum(counts) / counts.sum())

    def inverse(self, u: np.ndarray) -> np.ndarray:
        """Generalised inverse: value v is returned for u in (F(v-), F(v)]."""
        idx = np.searchsorted(self.cumulative, u, side="left")
        return self.support[np.minimum(idx, len(self.support) - 1)]


def pseudo_observations(x: np.ndarray) -> np.ndarray:
    """Midrank / (l + 1), column by column."""
    return rankdata(x, method="average", axis=0) / (x.shape[0] + 1)


def gaussian_copula_generate(data: BinaryTable, m: int, seed: SeedSpec,
                             eigen_floor: float = 1e-8) -> BinaryTable:
    """Rank-based Gaussian copula with step-CDF inversion back to the data scale."""
    if data.n_rows < 2:
        raise DataError("gaussian copula needs at least 2 rows")
    x = data.float_values()
    latent = ndtri(pseudo_observations(x))
    corr = pearson_matrix(latent).matrix
    factor = cholesky_psd(corr, eigen_floor)
    u = ndtr(sample_latent(factor, m, seed.rng()))
    out = np.empty((m, x.shape[1]))
    for j in range(x.shape[1]):
        out[:, j] = EmpiricalMarginal.fit(x[:, j]).inverse(u[:, j])
    labels = None
    if data.has_labels and len(np.unique(data.labels)) == 1:
        labels = np.full(m, int(data.labels[0]), dtype=np.uint8)
    return BinaryTable(out, data.feature_names, labels, binary=data.binary)


def random_oversample(minority: BinaryTable, m: int, seed: SeedSpec) -> BinaryTable:
    """m rows drawn uniformly with replacement."""
    if minority.n_rows < 1:
        raise DataError("cannot oversample an empty table")
    idx = seed.rng().integers(0, minority.n_rows, size=m)
    return minority.take(idx)


def smote_interpolate(x, neighbour, gap: float) -> np.ndarray:
    """x + gap * (neighbour - x); exposed for direct checks of the interpolation rule."""
    x = np.asarray(x, dtype=np.float64)
    if not 0.0 <= gap <= 1.0 or math.isnan(gap):
        raise ValueError("gap must lie in [0, 1]")
    return x + gap * (np.asarray(neighbour, dtype=np.float64) - x)
