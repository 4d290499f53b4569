"""Comparison tests: a band-excluded U-statistic (ZCQ) and a
diagonal-standardised test for independent data (SRI).

ZCQ drops all observation pairs closer than b in time,

    T_ZCQ = sum_{|t1-t2| >= b} X_{t1}'X_{t2} / ((n-b)(n-b+1)),

which removes dependence-induced bias without any centering term. Its
variance is estimated here from the same split-sample lag products used
by the main test, combined with quadratic-spectral kernel weights over
lags up to the lag window (default floor(n/10)); the point statistic is
standard, the variance recipe is a faithful-in-spirit stand-in for the
original kernel-smoothed U-statistic estimator.

SRI is the classical one-sample test for i.i.d. data built from
n * xbar' D^{-1} xbar with D the diagonal of the sample covariance; it is
included to show how badly an independence-based test miscalibrates under
temporal dependence.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import NumericalError
from .testcore import TestResult, as_series_matrix


@dataclass(frozen=True)
class ZcqConfig:
    """Exclusion bandwidth and lag window for the ZCQ test.

    b=None selects ceil(n^(1/4)); lag_window=None selects floor(n/10).
    """

    b: int | None = None
    lag_window: int | None = None

    def __post_init__(self):
        if self.b is not None and self.b < 1:
            raise ValueError("exclusion bandwidth must be positive")
        if self.lag_window is not None and self.lag_window < 0:
            raise ValueError("lag window must be non-negative")


def qs_kernel(x):
    """Quadratic spectral kernel k(x) with k(0) = 1 (Andrews form):

        k(x) = 25/(12 pi^2 x^2) * (sin(6 pi x/5)/(6 pi x/5) - cos(6 pi x/5))
    """
    if x == 0:
        return 1.0
    u = 6.0 * math.pi * x / 5.0
    return 25.0 / (12.0 * math.pi**2 * x**2) * (math.sin(u) / u - math.cos(u))


def zcq_statistic(x, b):
    """Band-excluded pair sum over |t1 - t2| >= b, normalised by the
    ordered pair count (n-b)(n-b+1). Computed in O(npb) via diagonal sums."""
    x = as_series_matrix(x)
    n = x.shape[0]
    if b < 1:
        raise ValueError("exclusion bandwidth must be positive")
    if b >= n:
        raise ValueError("bandwidth exhausts sample")
    col_sums = x.sum(axis=0)
    total = float(np.dot(col_sums, col_sums))  # sum over all ordered pairs
    band = float((x * x).sum())                # |t1 - t2| = 0
    for d in range(1, b):
        band += 2.0 * float((x[:-d] * x[d:]).sum())
    return (total - band) / ((n - b) * (n - b + 1))


def _resolve_zcq(config, n):
    b = config.b if config.b is not None else int(math.ceil(n ** 0.25))
    lag = config.lag_window if config.lag_window is not None else n // 10
    if b >= n:
        raise ValueError("bandwidth exhausts sample")
    if lag >= n:
        raise ValueError("lag window too large")
    return b, lag


def _band_lag_product(raw_gram, h1, h2, sep):
    """Band-excluded estimate of tr(Gamma_h1 Gamma_h2) from raw products:

        sum_{t} sum_{s >= t+sep} R[t,s] * R[t+h1, s+h2] / count,

    where R is the uncentered Gram matrix and count = T(T+1)/2 with
    T = n - h2 - sep. Excluding pairs closer than `sep` keeps the two lag
    factors essentially independent, mirroring the statistic's own
    band-exclusion rule.
    """
    n = raw_gram.shape[0]
    rows = n - h2 - sep
    if rows < 1:
        raise ValueError("series too short for lag window")
    parts = []
    for t in range(rows):
        lo = t + sep
        parts.append(float(np.dot(raw_gram[t, lo: n - h2],
                                  raw_gram[t + h1, lo + h2: n])))
    return math.fsum(parts) / (rows * (rows + 1) / 2.0)




def zcq_test(x, config=ZcqConfig(), alpha=0.05):
    """Band-excluded test with a QS-kernel long-run variance estimate.

    tr(Omega^2) is estimated by the kernel-weighted lag sum

        sum_{|h1|, |h2| <= L} k(h1/L) k(h2/L) * D_{|h1|, |h2|},

    where D_{h1,h2} are band-excluded raw lag products (pairs at least
    L + b apart) and L is the lag window. Raw products are used because
    the statistic itself carries no centering term; global demeaning would
    shift every long-range Gram entry by about -tr(Omega)/n, and over the
    ~(2L+1)^2 weighted lag pairs those shifts accumulate into a
    (sum w * tr(Omega)/n)^2 overshoot of tr(Omega^2). The statistic's
    variance is then 2*tr(Omega^2) over the included pair count. Elapsed
    time covers the variance estimation, which dominates the cost.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    x = as_series_matrix(x)
    n = x.shape[0]
    start = time.perf_counter()
    b, lag = _resolve_zcq(config, n)
    stat = zcq_statistic(x, b)
    raw_gram = x @ x.T
    raw_gram = (raw_gram + raw_gram.T) / 2.0
    # fold the symmetric lag grid: weight 1 at h=0, 2*k(h/L) at h >= 1
    weights = np.ones(lag + 1)
    for h in range(1, lag + 1):
        weights[h] = 2.0 * qs_kernel(h / lag)
    sep = lag + b
    tr_omega2 = math.fsum(
        weights[h1] * weights[h2] * _band_lag_product(raw_gram, h1, h2, sep)
        for h1 in range(lag + 1) for h2 in range(lag + 1)
    )
    npairs = (n - b) * (n - b + 1)
    var = 2.0 * tr_omega2 / npairs
    if not math.isfinite(var) or var <= 0:
        raise NumericalError("variance estimate non-positive")
    z = stat / math.sqrt(var)
    p_value = float(norm.sf(z))
    reject = bool(z > norm.isf(alpha))
    elapsed = time.perf_counter() - start
    return TestResult(statistic=stat, mu_hat=0.0, sigma2_hat=var, z=z,
                      p_value=p_value, reject=reject, m_used=b, elapsed=elapsed)


def sri_test(x, alpha=0.05):
    """Diagonal-standardised sum test for independent data.

    With S the sample covariance (divisor n-1), D its diagonal and
    R = D^{-1/2} S D^{-1/2}, the standardised statistic is

        z = [n xbar' D^{-1} xbar - (n-1)p/(n-3)]
            / sqrt(2 (tr(R^2) - p^2/(n-1)) c_pn),   c_pn = 1 + tr(R^2)/p^{3/2},

    following Srivastava & Du (2008, J. Multivariate Anal. 99) with the
    one-sided normal rejection rule. Valid for i.i.d. rows only; under
    temporal dependence it is expected to over-reject drastically.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    x = as_series_matrix(x)
    n, p = x.shape
    if n < 4:
        raise ValueError("need at least 4 observations")
    start = time.perf_counter()
    xbar = x.mean(axis=0)
    xc = x - xbar
    cov = (xc.T @ xc) / (n - 1)
    diag = np.diagonal(cov)
    if np.any(diag <= 0):
        raise NumericalError("degenerate coordinate")
    inv_sd = 1.0 / np.sqrt(diag)
    corr = cov * np.outer(inv_sd, inv_sd)
    tr_r2 = float(np.einsum("ij,ji->", corr, corr))
    stat = n * float(np.dot(xbar / diag, xbar))
    center = (n - 1) * p / (n - 3)
    c_pn = 1.0 + tr_r2 / p**1.5
    var = 2.0 * (tr_r2 - p * p / (n - 1)) * c_pn
    if not math.isfinite(var) or var <= 0:
        raise NumericalError("variance estimate non-positive")
    z = (stat - center) / math.sqrt(var)
    p_value = float(norm.sf(z))
    reject = bool(z > norm.isf(alpha))
    elapsed = time.perf_counter() - start
    return TestResult(statistic=stat, mu_hat=center, sigma2_hat=var, z=z,
                      p_value=p_value, reject=reject, m_used=0, elapsed=elapsed)
