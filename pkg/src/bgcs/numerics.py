"""Normal CDF/quantile, bivariate normal CDF, PSD-repairing Cholesky and PCA."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import ndtr, ndtri


class NumericError(ArithmeticError):
    """A numeric routine could not produce a valid result."""


_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_GL_NODES, _GL_WEIGHTS = leggauss(12)
_DEGENERATE_RHO = 1.0 - 1e-10
_BVN_TOL = 1e-11


def std_normal_cdf(x):
    """Standard normal CDF; accepts scalars or arrays, rejects NaN."""
    arr = np.asarray(x, dtype=np.float64)
    if np.isnan(arr).any():
        raise ValueError("std_normal_cdf: NaN input")
    out = ndtr(arr)
    return float(out) if out.ndim == 0 else out


def std_normal_quantile(u):
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    arr = np.asarray(u, dtype=np.float64)
    if np.isnan(arr).any() or (arr <= 0.0).any() or (arr >= 1.0).any():
        raise ValueError("std_normal_quantile: argument must lie strictly in (0, 1)")
    out = ndtri(arr)
    return float(out) if out.ndim == 0 else out


def std_normal_pdf(x):
    x = np.asarray(x, dtype=np.float64)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _gl_panel(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def _adaptive(f, lo, hi, whole, tol, depth):
    mid = 0.5 * (lo + hi)
    left = _gl_panel(f, lo, mid)
    right = _gl_panel(f, mid, hi)
    if depth >= 40 or abs(left + right - whole) <= tol:
        return left + right
    return _adaptive(f, lo, mid, left, 0.5 * tol, depth + 1) + _adaptive(
        f, mid, hi, right, 0.5 * tol, depth + 1
    )


def integrate(f, lo: float, hi: float, breakpoints=(), tol: float = _BVN_TOL) -> float:
    """Adaptive Gauss-Legendre quadrature of a vectorised integrand."""
    edges = sorted({lo, hi, *(b for b in breakpoints if lo < b < hi)})
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += _adaptive(f, a, b, _gl_panel(f, a, b), tol / (len(edges) - 1), 0)
    return total


def bivariate_normal_cdf(a: float, b: float, rho: float) -> float:
    """P(Z1 <= a, Z2 <= b) for standard normals with correlation ``rho``.

    Uses the angle form
    Phi(a) Phi(b) + 1/(2 pi) * int_0^asin(rho) exp(-(a^2 - 2ab sin t + b^2) / (2 cos^2 t)) dt,
    whose integrand is bounded by one on a finite interval, so adaptive
    quadrature stays reliable right up to |rho| = 1.
    """
    a, b, rho = float(a), float(b), float(rho)
    if math.isnan(a) or math.isnan(b) or math.isnan(rho):
        raise ValueError("bivariate_normal_cdf: NaN input")
    if abs(rho) > 1.0 + 1e-12:
        raise ValueError(f"bivariate_normal_cdf: |rho| = {abs(rho)} exceeds 1")
    if a == -math.inf or b == -math.inf:
        return 0.0
    if a == math.inf:
        return float(ndtr(b))
    if b == math.inf:
        return float(ndtr(a))
    if rho == 0.0:
        return float(ndtr(a) * ndtr(b))
    if rho >= _DEGENERATE_RHO:
        return float(ndtr(min(a, b)))
    if rho <= -_DEGENERATE_RHO:
        return max(0.0, float(ndtr(a) + ndtr(b) - 1.0))
    hs = 0.5 * (a * a + b * b)
    ab = a * b

    def integrand(t):
        st = np.sin(t)
        return np.exp((ab * st - hs) / (1.0 - st * st))

    upper = math.asin(rho)
    lo, hi = (0.0, upper) if upper > 0 else (upper, 0.0)
    area = integrate(integrand, lo, hi)
    value = float(ndtr(a) * ndtr(b)) + math.copysign(area, upper) / (2.0 * math.pi)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class CholeskyFactor:
    lower: np.ndarray
    repaired: np.ndarray
    was_repaired: bool
    repair_magnitude: float
    min_eigenvalue: float


def _check_correlation(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"correlation matrix must be square, got {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("correlation matrix has non-finite entries")
    if np.abs(m - m.T).max(initial=0.0) > 1e-12:
        raise ValueError("correlation matrix is not symmetric")
    if np.abs(np.diag(m) - 1.0).max(initial=0.0) > 1e-12:
        raise ValueError("correlation matrix must have a unit diagonal")
    return 0.5 * (m + m.T)


def psd_repair(m: np.ndarray, eigen_floor: float = 1e-8) -> np.ndarray:
    """Clip eigenvalues at ``eigen_floor`` and rescale back to a unit diagonal."""
    w, v = np.linalg.eigh(m)
    rebuilt = (v * np.maximum(w, eigen_floor)) @ v.T
    d = 1.0 / np.sqrt(np.diag(rebuilt))
    out = rebuilt * d[:, None] * d[None, :]
    out = 0.5 * (out + out.T)
    np.fill_diagonal(out, 1.0)
    return out


def cholesky_psd(m, eigen_floor: float = 1e-8) -> CholeskyFactor:
    m = _check_correlation(m)
    try:
        lower = np.linalg.cholesky(m)
        w_min = float(np.linalg.eigvalsh(m)[0]) if len(m) else 0.0
        return CholeskyFactor(lower, m, False, 0.0, w_min)
    except np.linalg.LinAlgError:
        pass
    floor = eigen_floor
    for _ in range(8):
        repaired = psd_repair(m, floor)
        try:
            lower = np.linalg.cholesky(repaired)
        except np.linalg.LinAlgError:
            floor = max(floor * 10.0, 1e-12)
            continue
        return CholeskyFactor(
            lower,
            repaired,
            True,
            float(np.abs(repaired - m).max()),
            float(np.linalg.eigvalsh(repaired)[0]),
        )
    raise NumericError("cholesky_psd: repair did not yield a factorizable matrix")


@dataclass(frozen=True)
class PcaBasis:
    components: np.ndarray  # (k, n), rows orthonormal
    explained_variance: np.ndarray
    mean: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]


def pca_fit(data, k: int) -> PcaBasis:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("pca_fit needs a 2-D array with at least 2 rows")
    n = x.shape[1]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (x.shape[0] - 1)
    w, v = np.linalg.eigh(cov)
    order = np.argsort(-w, kind="stable")[:k]
    comps = v[:, order].T.copy()
    # deterministic sign: the largest-magnitude loading of each component is positive
    pivots = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(k), pivots])
    signs[signs == 0] = 1.0
    comps *= signs[:, None]
    return PcaBasis(comps, np.maximum(w[order], 0.0), mean)


def pca_project(basis: PcaBasis, data) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    if x.shape[1] != basis.components.shape[1]:
        raise ValueError("data width does not match the PCA basis")
    return (x - basis.mean) @ basis.components.T
