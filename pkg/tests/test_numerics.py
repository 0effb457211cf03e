import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import multivariate_normal

from bgcs.numerics import (NumericError, bivariate_normal_cdf, cholesky_psd, integrate,
                           pca_fit, pca_project, psd_repair, std_normal_cdf,
                           std_normal_quantile)

mpmath.mp.dps = 30

# mpmath values computed at 30 digits
PHI_1959964 = 0.975000000903557598
PHI_MINUS_8 = 6.22096057427178e-16
QUANTILE_0975 = 1.959963984540054


def mp_phi(x):
    return float(mpmath.ncdf(x))


def test_cdf_frozen_values():
    assert std_normal_cdf(1.959964) == pytest.approx(PHI_1959964, abs=1e-15)
    assert std_normal_cdf(-8.0) == pytest.approx(PHI_MINUS_8, rel=1e-12)
    assert std_normal_cdf(0.0) == 0.5


@pytest.mark.parametrize("x", np.linspace(-37, 8, 91))
def test_cdf_against_mpmath(x):
    ref = mp_phi(x)
    got = std_normal_cdf(x)
    assert abs(got - ref) <= 1e-15 + 1e-13 * ref


def test_quantile_frozen_value():
    assert std_normal_quantile(0.975) == pytest.approx(QUANTILE_0975, abs=1e-12)


@given(st.floats(1e-300, 1 - 1e-12))
def test_quantile_inverts_cdf(u):
    x = std_normal_quantile(u)
    assert std_normal_cdf(x) == pytest.approx(u, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_quantile_rejects(bad):
    with pytest.raises(ValueError):
        std_normal_quantile(bad)


def test_cdf_rejects_nan():
    with pytest.raises(ValueError):
        std_normal_cdf(float("nan"))


def test_integrate_polynomial_and_breakpoint():
    assert integrate(lambda t: t ** 5, 0.0, 2.0) == pytest.approx(64 / 6, rel=1e-12)
    assert integrate(np.abs, -1.0, 2.0, breakpoints=(0.0,)) == pytest.approx(2.5, rel=1e-12)


def mp_bvn(a, b, rho):
    # direct 1-D reduction with mpmath as an independent oracle
    s = mpmath.sqrt(1 - mpmath.mpf(rho) ** 2)
    f = lambda z: mpmath.npdf(z) * mpmath.ncdf((b - rho * z) / s)
    return float(mpmath.quad(f, [-mpmath.inf, 0, a]))


@pytest.mark.parametrize("a,b,rho", [
    (0.0, 0.0, 0.5), (1.0, -0.5, 0.3), (-1.2, 0.7, -0.8), (2.0, 2.0, 0.95),
    (-3.0, -3.0, 0.99), (0.5, 1.5, -0.999), (0.0, 0.0, -0.999999), (-2.0, 1.0, 0.0),
])
def test_bvn_against_mpmath(a, b, rho):
    assert bivariate_normal_cdf(a, b, rho) == pytest.approx(mp_bvn(a, b, rho), abs=1e-10)


def test_bvn_closed_form_at_origin():
    for rho in (-0.9, -0.5, 0.0, 0.5, 0.9):
        assert bivariate_normal_cdf(0, 0, rho) == pytest.approx(
            0.25 + math.asin(rho) / (2 * math.pi), abs=1e-12)


def test_bvn_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(30):
        a, b = rng.normal(size=2) * 1.5
        rho = rng.uniform(-0.98, 0.98)
        ref = multivariate_normal.cdf([a, b], mean=[0, 0], cov=[[1, rho], [rho, 1]],
                                      abseps=1e-12, releps=1e-12)
        assert bivariate_normal_cdf(a, b, rho) == pytest.approx(ref, abs=1e-8)


def test_bvn_monte_carlo():
    rng = np.random.default_rng(11)
    n = 1_000_000
    rho = -0.6
    z1 = rng.standard_normal(n)
    z2 = rho * z1 + math.sqrt(1 - rho ** 2) * rng.standard_normal(n)
    hit = ((z1 <= 0.3) & (z2 <= -0.4)).mean()
    p = bivariate_normal_cdf(0.3, -0.4, rho)
    assert abs(hit - p) <= 4 * math.sqrt(p * (1 - p) / n)


def test_bvn_limits():
    assert bivariate_normal_cdf(-math.inf, 1.0, 0.3) == 0.0
    assert bivariate_normal_cdf(math.inf, 1.0, 0.3) == pytest.approx(std_normal_cdf(1.0))
    assert bivariate_normal_cdf(0.4, 0.2, 1.0) == pytest.approx(std_normal_cdf(0.2))
    assert bivariate_normal_cdf(0.4, 0.2, -1.0) == pytest.approx(
        std_normal_cdf(0.4) + std_normal_cdf(0.2) - 1)
    with pytest.raises(ValueError):
        bivariate_normal_cdf(0, 0, 1.1)
    with pytest.raises(ValueError):
        bivariate_normal_cdf(float("nan"), 0, 0.1)


finite = st.floats(-6, 6)
corr = st.floats(-0.999, 0.999)


@settings(max_examples=60, deadline=None)
@given(finite, finite, corr)
def test_bvn_symmetry_and_bounds(a, b, rho):
    v = bivariate_normal_cdf(a, b, rho)
    assert 0.0 <= v <= min(std_normal_cdf(a), std_normal_cdf(b)) + 1e-12
    assert v == pytest.approx(bivariate_normal_cdf(b, a, rho), abs=1e-12)
    # Frechet lower bound
    assert v >= std_normal_cdf(a) + std_normal_cdf(b) - 1 - 1e-12


@settings(max_examples=40, deadline=None)
@given(finite, finite, st.floats(-0.99, 0.98))
def test_bvn_monotone_in_rho(a, b, rho):
    assert bivariate_normal_cdf(a, b, rho + 0.01) >= bivariate_normal_cdf(a, b, rho) - 1e-12


def test_cholesky_reconstructs_pd():
    m = np.array([[1, 0.5, 0.2], [0.5, 1, 0.3], [0.2, 0.3, 1.0]])
    f = cholesky_psd(m)
    assert not f.was_repaired
    np.testing.assert_allclose(f.lower @ f.lower.T, m, atol=1e-14)
    assert np.allclose(np.triu(f.lower, 1), 0)


def test_psd_repair_indefinite():
    a = math.sqrt(0.25755)
    m = np.array([[1, a, a], [a, 1, -0.5], [a, -0.5, 1]])
    assert np.linalg.eigvalsh(m).min() == pytest.approx(-0.01, abs=1e-6)
    f = cholesky_psd(m, eigen_floor=1e-8)
    assert f.was_repaired
    assert f.repair_magnitude > 0
    rebuilt = f.lower @ f.lower.T
    np.testing.assert_allclose(np.diag(rebuilt), 1.0, atol=1e-12)
    assert np.linalg.eigvalsh(rebuilt).min() > 0
    np.testing.assert_allclose(rebuilt, rebuilt.T, atol=1e-14)
    r = psd_repair(m, 1e-8)
    np.testing.assert_allclose(np.diag(r), 1.0)


def test_cholesky_rejects_bad_input():
    with pytest.raises((ValueError, NumericError)):
        cholesky_psd(np.array([[1, 0.2], [0.3, 1]]))
    with pytest.raises((ValueError, NumericError)):
        cholesky_psd(np.array([[1, np.nan], [np.nan, 1]]))


def test_cholesky_rank_deficient():
    m = np.ones((4, 4))
    f = cholesky_psd(m)
    np.testing.assert_allclose(np.diag(f.lower @ f.lower.T), 1.0, atol=1e-12)


def test_pca_orthonormal_and_variance():
    rng = np.random.default_rng(3)
    x = (rng.random((200, 12)) < 0.3).astype(float)
    basis = pca_fit(x, 12)
    c = basis.components
    np.testing.assert_allclose(c @ c.T, np.eye(12), atol=1e-10)
    total = np.var(x, axis=0, ddof=1).sum()
    assert basis.explained_variance.sum() == pytest.approx(total, abs=1e-8)
    assert (np.diff(basis.explained_variance) <= 1e-12).all()
    proj = pca_project(basis, x)
    np.testing.assert_allclose(proj.var(axis=0, ddof=1), basis.explained_variance, atol=1e-10)
    # deterministic sign
    np.testing.assert_array_equal(pca_fit(x, 2).components, pca_fit(x.copy(), 2).components)
