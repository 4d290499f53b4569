"""The mean test: statistic, centering and variance estimators, decision.

For an n x p series X with sample mean xbar, the test statistic is

    T_n = (n * xbar'xbar - (1/n) * sum_t X_t'X_t) / 2,

algebraically the off-diagonal pair sum (1/n) * sum_{s<t} X_t'X_s but
computable in O(np). Its centering and variance are estimated from the
centered Gram matrix G[t,s] = (X_t - xbar)'(X_s - xbar):

    mu_hat    = (1/n) sum_{h=1}^{M} ((n-h)/n) sum_{t=1}^{n-h} G[t, t+h]
    S_{h1,h2} = split-sample product estimator of tr(Gamma_{h1} Gamma_{h2})
    sigma2_hat = (S_00 + 2 sum S_{h1,0} + 2 sum S_{0,h2} + 4 sum sum S_{h1,h2}) / 2

with bandwidth M = ceil(min(n, p)^(1/8)) unless fixed by the caller. The
null is rejected one-sided when z = (T_n - mu_hat)/sqrt(sigma2_hat)
exceeds the upper alpha quantile of N(0, 1).

Computing G once costs O(n^2 p); every estimator is then O(M n) or
O(M^2 n^2), versus O(M^2 n^2 p) for a direct evaluation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import NumericalError
from .model import guarded_ceil


@dataclass(frozen=True)
class TestConfig:
    """Test inputs: significance level and bandwidth policy.

    m=None selects the ceil(min(n, p)^(1/8)) rule; a fixed m must satisfy
    1 <= m and 2m < floor(n/2) so all estimator index ranges are valid.
    """

    alpha: float = 0.05
    m: int | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.m is not None and self.m < 1:
            raise ValueError("bandwidth must be at least 1")


@dataclass(frozen=True)
class TestResult:
    statistic: float
    mu_hat: float
    sigma2_hat: float
    z: float
    p_value: float
    reject: bool
    m_used: int
    elapsed: float


def as_series_matrix(x):
    """Validate and return the observations as an n x p float64 array
    (rows = time points). Requires n >= 2, p >= 1, all entries finite."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("series must be a 2-d array (rows = time points)")
    n, p = x.shape
    if n < 2 or p < 1:
        raise ValueError("series must have at least 2 rows and 1 column")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def select_m(n, p, m=None):
    """Bandwidth selection: ceil(min(n, p)^(1/8)) when m is None.

    The eighth root is snapped to an exact integer when within 1e-9 so
    cases like 256^(1/8) do not ceil to 3. Both the rule and a fixed m
    must satisfy 2m < floor(n/2).
    """
    if n < 4 or p < 1:
        raise ValueError("need n >= 4 and p >= 1")
    if m is None:
        m = guarded_ceil(min(n, p) ** 0.125)
    if m < 1:
        raise ValueError("bandwidth must be at least 1")
    if 2 * m >= n // 2:
        raise ValueError("series too short for bandwidth")
    return int(m)


def statistic_tn(x):
    """Test statistic T_n = (n*xbar'xbar - (1/n)*sum_t X_t'X_t) / 2."""
    x = as_series_matrix(x)
    n = x.shape[0]
    col_sums = x.sum(axis=0)
    sq = float(np.dot(col_sums, col_sums))  # = n^2 * xbar'xbar
    norms = float((x * x).sum())            # = sum_t X_t'X_t
    return 0.5 * (sq / n - norms / n)


def build_gram(x):
    """Centered Gram matrix G[t,s] = (X_t - xbar)'(X_s - xbar).

    One O(n^2 p) pass shared by the centering and variance estimators.
    Symmetrised explicitly so G == G.T holds bitwise.
    """
    x = as_series_matrix(x)
    xc = x - x.mean(axis=0)
    g = xc @ xc.T
    return (g + g.T) / 2.0


def trace_gamma_hat(gram, h):
    """Lag-h autocovariance trace estimate (1/n) * sum_t G[t, t+h]."""
    n = gram.shape[0]
    if not 0 <= h < n:
        raise ValueError("lag out of range")
    return math.fsum(np.diagonal(gram, offset=h)) / n


def mu_hat(gram, m):
    """Centering estimate: sum_{h=1}^{m} (1 - h/n) * trace_gamma_hat(G, h)."""
    n = gram.shape[0]
    if not 1 <= m < n:
        raise ValueError("bandwidth out of range")
    return math.fsum(
        (1.0 - h / n) * math.fsum(np.diagonal(gram, offset=h)) / n
        for h in range(1, m + 1)
    )


def s_h1h2(gram, h1, h2):
    """Split-sample estimate of tr(Gamma_{h1} Gamma_{h2}).

    Pairs observations at least floor(n/2) apart so the two lag products
    come from approximately independent segments:

        sum_{t=1}^{K} sum_{s=t+m}^{n-h2} G[t,s] * G[t+h1, s+h2]
        -----------------------------------------------------,
             (n - h2/2 - (3/2) m + 1/2) * K

    with m = floor(n/2) and K = m - h2. The denominator equals the exact
    number of (t, s) terms in the double sum.
    """
    n = gram.shape[0]
    if h1 < 0 or h2 < 0:
        raise ValueError("lags must be non-negative")
    m = n // 2
    k = m - h2
    if k < 1:
        raise ValueError("series too short for lag h2")
    if k - 1 + h1 >= n:
        raise ValueError("lag out of range")
    parts = []
    for t in range(k):
        lo = t + m
        parts.append(float(np.dot(gram[t, lo: n - h2], gram[t + h1, lo + h2: n])))
    denom = (n - h2 / 2.0 - 1.5 * m + 0.5) * k
    return math.fsum(parts) / denom


def sigma2_hat(gram, m):
    """Variance estimate combining the split-sample products over all lag
    pairs (h1, h2) in {0..m}^2; raises if the result is not positive."""
    n = gram.shape[0]
    if not 1 <= m < n // 2:
        raise ValueError("bandwidth out of range")
    table = {(h1, h2): s_h1h2(gram, h1, h2)
             for h1 in range(m + 1) for h2 in range(m + 1)}
    total = math.fsum(
        table[h1, h2] * (1.0 if h1 == 0 else 2.0) * (1.0 if h2 == 0 else 2.0)
        for h1 in range(m + 1) for h2 in range(m + 1)
    )
    value = 0.5 * total
    if not math.isfinite(value) or value <= 0:
        raise NumericalError("variance estimate non-positive")
    return value


def run_test(x, config=TestConfig()):
    """Run the full test on an n x p series; returns a TestResult.

    Composes bandwidth selection, the Gram pass, T_n, mu_hat and
    sigma2_hat, then standardises and rejects one-sided at level alpha.
    """
    x = as_series_matrix(x)
    n, p = x.shape
    if n < 8:
        raise ValueError("need at least 8 observations")
    start = time.perf_counter()
    m = select_m(n, p, config.m)
    gram = build_gram(x)
    stat = statistic_tn(x)
    center = mu_hat(gram, m)
    var = sigma2_hat(gram, m)
    z = (stat - center) / math.sqrt(var)
    p_value = float(norm.sf(z))
    reject = bool(z > norm.isf(config.alpha))
    elapsed = time.perf_counter() - start
    return TestResult(statistic=stat, mu_hat=center, sigma2_hat=var, z=z,
                      p_value=p_value, reject=reject, m_used=m, elapsed=elapsed)


def rolling_test(x, window, config=TestConfig()):
    """Run the test on every length-`window` slice of consecutive rows.

    Returns a list of (start, TestResult) ordered by the 0-based start
    index; there are n - window + 1 windows.
    """
    x = as_series_matrix(x)
    n = x.shape[0]
    if not 8 <= window <= n:
        raise ValueError("window must be between 8 and n")
    return [(start, run_test(x[start: start + window], config))
            for start in range(n - window + 1)]
