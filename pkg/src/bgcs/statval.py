"""Real-vs-synthetic validity checks: proportion z-tests, marginal summaries,
correlation fidelity and a PCA overlay export."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import ndtr, ndtri

from .copula import pearson_matrix
from .data import BinaryTable, DataError
from .numerics import pca_fit, pca_project

DEFAULT_ALPHAS = (0.10, 0.05, 0.025, 0.01, 0.005, 0.001)
SIMILAR, DISSIMILAR = "similar", "dissimilar"


@dataclass
class ProportionTestResult:
    feature: str
    n1: int
    n2: int
    x1: int
    x2: int
    p_hat1: float
    p_hat2: float
    pooled_p: float
    z: float
    p_value: float
    degenerate: bool = False
    verdicts: dict = field(default_factory=dict)

    def judge(self, alphas) -> "ProportionTestResult":
        self.verdicts = {
            float(a): DISSIMILAR if abs(self.z) > critical_value(a) else SIMILAR
            for a in alphas
        }
        return self

    def to_json(self) -> dict:
        doc = {k: getattr(self, k) for k in (
            "feature", "n1", "n2", "x1", "x2", "p_hat1", "p_hat2", "pooled_p", "degenerate")}
        doc["z"] = _finite_or_str(self.z)
        doc["p_value"] = self.p_value
        doc["verdicts"] = {repr(a): v for a, v in self.verdicts.items()}
        return doc


def _finite_or_str(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def critical_value(alpha: float) -> float:
    """Two-sided critical |z| at significance ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return float(ndtri(1.0 - alpha / 2.0))


def two_proportion_ztest(x1: int, n1: int, x2: int, n2: int, feature: str = "") -> ProportionTestResult:
    """Pooled two-proportion z-test, two-sided, no continuity correction."""
    if n1 < 1 or n2 < 1:
        raise ValueError("sample sizes must be at least 1")
    if not (0 <= x1 <= n1 and 0 <= x2 <= n2):
        raise ValueError("success counts must lie in [0, n]")
    p1, p2 = x1 / n1, x2 / n2
    pooled = (x1 + x2) / (n1 + n2)
    var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
    degenerate = var <= 0.0
    if degenerate:
        z = 0.0 if p1 == p2 else math.copysign(math.inf, p1 - p2)
    else:
        z = (p1 - p2) / math.sqrt(var)
    p_value = 1.0 if z == 0.0 else float(2.0 * ndtr(-abs(z)))
    return ProportionTestResult(feature, n1, n2, x1, x2, p1, p2, pooled, z, p_value, degenerate)


def count_ones(table: BinaryTable) -> np.ndarray:
    """Per-column count of cells exactly equal to one (fractional cells count as not-one)."""
    return (table.values == 1).sum(axis=0).astype(np.int64)


def _require_matching(real: BinaryTable, synthetic: BinaryTable) -> None:
    if real.feature_names != synthetic.feature_names:
        raise DataError("real and synthetic tables have different features")


@dataclass
class ValiditySummary:
    alphas: tuple
    results: list

    @property
    def n_features(self) -> int:
        return len(self.results)

    def _finite_z(self) -> np.ndarray:
        z = np.array([r.z for r in self.results], dtype=np.float64)
        return z[np.isfinite(z)]

    @property
    def n_dissimilar(self) -> int:
        return sum(v == DISSIMILAR for r in self.results for v in r.verdicts.values())

    @property
    def n_similar(self) -> int:
        return sum(v == SIMILAR for r in self.results for v in r.verdicts.values())

    def similar_by_alpha(self) -> dict:
        return {a: sum(r.verdicts[a] == SIMILAR for r in self.results) for a in self.alphas}

    def table_rows(self) -> dict:
        z = self._finite_z()
        p = np.array([r.p_value for r in self.results], dtype=np.float64)

        def rng(v):
            return [float(v.min()), float(v.max())] if v.size else [None, None]

        def stat(fn, v):
            return float(fn(v)) if v.size else None

        return {
            "Z-Statistic Range": rng(z),
            "Z-Statistic Mean": stat(np.mean, z),
            "Z-Statistic Std": stat(np.std, z),
            "P-Value Range": rng(p),
            "P-value Mean": stat(np.mean, p),
            "P-value Std": stat(np.std, p),
            "Number of Dissimilar Instances": self.n_dissimilar,
            "Number of Similar Instances": self.n_similar,
        }

    def to_json(self) -> dict:
        return {
            "summary": self.table_rows(),
            "n_features": self.n_features,
            "alphas": list(self.alphas),
            "n_scenarios": self.n_features * len(self.alphas),
            "n_degenerate": sum(r.degenerate for r in self.results),
            "similar_by_alpha": {repr(a): n for a, n in self.similar_by_alpha().items()},
            "features": [r.to_json() for r in self.results],
        }


def feature_test_suite(real: BinaryTable, synthetic: BinaryTable,
                       alphas=DEFAULT_ALPHAS) -> ValiditySummary:
    _require_matching(real, synthetic)
    alphas = tuple(sorted(float(a) for a in alphas))
    x1, x2 = count_ones(real), count_ones(synthetic)
    results = [
        two_proportion_ztest(int(a), real.n_rows, int(b), synthetic.n_rows, name).judge(alphas)
        for name, a, b in zip(real.feature_names, x1, x2)
    ]
    return ValiditySummary(alphas, results)


def univariate_summary(real: BinaryTable, synthetic: BinaryTable) -> list[dict]:
    """Proportions and running fraction-of-ones series per feature."""
    _require_matching(real, synthetic)
    rv, sv = real.float_values(), synthetic.float_values()
    p_real, p_syn = rv.mean(axis=0), sv.mean(axis=0)
    cum_r = np.cumsum(rv, axis=0) / np.arange(1, len(rv) + 1)[:, None]
    cum_s = np.cumsum(sv, axis=0) / np.arange(1, len(sv) + 1)[:, None]
    return [
        {
            "feature": name,
            "p_real": float(p_real[j]),
            "p_syn": float(p_syn[j]),
            "abs_diff": float(abs(p_real[j] - p_syn[j])),
            "cumsum_series_real": cum_r[:, j],
            "cumsum_series_syn": cum_s[:, j],
        }
        for j, name in enumerate(real.feature_names)
    ]


def correlation_fidelity(real: BinaryTable, synthetic: BinaryTable) -> dict:
    """Deviation between the two Pearson matrices over columns non-constant in both."""
    _require_matching(real, synthetic)
    if real.n_rows < 2 or synthetic.n_rows < 2:
        raise DataError("need at least 2 rows in each table")
    cr = pearson_matrix(real.float_values())
    cs = pearson_matrix(synthetic.float_values())
    keep = ~(cr.degenerate | cs.degenerate)
    dev = np.abs(cr.matrix - cs.matrix)[np.ix_(keep, keep)]
    return {
        "max_abs_dev": float(dev.max()) if dev.size else 0.0,
        "frobenius_dev": float(np.sqrt((dev ** 2).sum())),
        "per_pair_matrix": dev,
        "features": [n for n, k in zip(real.feature_names, keep) if k],
        "excluded": [n for n, k in zip(real.feature_names, keep) if not k],
    }


@dataclass
class PcaOverlay:
    coords: np.ndarray  # (rows, 2)
    source: np.ndarray  # "real" / "synthetic" per row
    explained_variance: np.ndarray

    def ranges(self) -> dict:
        out = {}
        for tag in ("real", "synthetic"):
            pts = self.coords[self.source == tag]
            out[tag] = {
                axis: ([float(pts[:, i].min()), float(pts[:, i].max())] if len(pts) else None)
                for i, axis in enumerate(("x", "y")[: self.coords.shape[1]])
            }
        return out

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "source"])
            for (x, y), s in zip(self.coords, self.source):
                w.writerow([repr(float(x)), repr(float(y)), s])


def pca_overlay(real: BinaryTable, synthetic: BinaryTable, k: int = 2) -> PcaOverlay:
    """Fit the basis on the real table only; project both."""
    _require_matching(real, synthetic)
    k = min(k, real.n_features)
    basis = pca_fit(real.float_values(), k)
    coords = np.vstack([pca_project(basis, real.float_values()),
                        pca_project(basis, synthetic.float_values())])
    if coords.shape[1] == 1:
        coords = np.hstack([coords, np.zeros((len(coords), 1))])
    source = np.array(["real"] * real.n_rows + ["synthetic"] * synthetic.n_rows)
    return PcaOverlay(coords, source, basis.explained_variance)


def write_summary(summary: ValiditySummary, path, extra: dict | None = None) -> None:
    doc = summary.to_json()
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
