"""Analytic reference quantities used to validate the estimators.

For a scalar-coefficient linear process Y_{t,j} = sum_k b_k Z_{t-k,j}
colored by Sigma^{1/2}, the autocovariances factor as Gamma_h = a_h Sigma
with a_h = sum_k b_k b_{k+h}, and the long-run covariance
Omega = Gamma_0 + 2 sum_{h>=1} Gamma_h satisfies

    tr(Omega^2) = s^4 tr(Sigma^2),   s = sum_k b_k,

which gives the closed-form asymptotic variance s^4 tr(Sigma^2) / 2. The
coefficient sequence is finite (exact for the MA processes the simulation
lab produces); matrix_autocov covers the general matrix-coefficient model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import build_ma_coefficient, build_sigma, psd_sqrt, replication_rng, simulate
from .testcore import statistic_tn


@dataclass(frozen=True)
class ScalarLinearProcess:
    """Finite coefficient sequence b_0..b_K plus a covariance Sigma."""

    b: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b, dtype=np.float64))
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if not np.all(np.isfinite(b)):
            raise ValueError("coefficients must be finite")
        if b.sum() == 0:
            raise ValueError("coefficient sum s must be non-zero")
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError("sigma must be a square matrix")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class OracleQuantities:
    """Closed-form quantities for a scalar linear process at bandwidth m."""

    a: np.ndarray             # autocovariance coefficients a_0..a_m
    tr_gamma: np.ndarray      # tr(Gamma_h) = a_h * tr(Sigma)
    tr_gamma_prod: np.ndarray  # tr(Gamma_h1 Gamma_h2) = a_h1 a_h2 tr(Sigma^2)
    mu_n: float
    sigma2_n: float
    s: float
    omega_trace2: float       # tr(Omega^2) = s^4 tr(Sigma^2)


def acov_coeff(b, h):
    """a_h = sum_{k=0}^{K-h} b_k b_{k+h}; zero once h exceeds the order."""
    if h < 0:
        raise ValueError("lag must be non-negative")
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if h >= b.size:
        return 0.0
    return float(np.dot(b[: b.size - h], b[h:]))


def true_mu_n(b, sigma, n, m):
    """Exact centering constant sum_{h=1}^{m} (1 - h/n) a_h tr(Sigma)."""
    if not 1 <= m < n:
        raise ValueError("bandwidth out of range")
    tr = float(np.trace(np.asarray(sigma)))
    return sum((1.0 - h / n) * acov_coeff(b, h) * tr for h in range(1, m + 1))


def true_sigma2_n(b, sigma):
    """Closed-form asymptotic variance s^4 tr(Sigma^2) / 2."""
    s = float(np.sum(b))
    sigma = np.asarray(sigma, dtype=np.float64)
    tr_sq = float(np.einsum("ij,ji->", sigma, sigma))
    return 0.5 * s**4 * tr_sq


def oracle_quantities(process, n, m):
    """Bundle of all closed-form quantities for a ScalarLinearProcess."""
    b, sigma = process.b, process.sigma
    a = np.array([acov_coeff(b, h) for h in range(m + 1)])
    tr = float(np.trace(sigma))
    tr_sq = float(np.einsum("ij,ji->", sigma, sigma))
    s = float(b.sum())
    return OracleQuantities(
        a=a,
        tr_gamma=a * tr,
        tr_gamma_prod=np.outer(a, a) * tr_sq,
        mu_n=true_mu_n(b, sigma, n, m),
        sigma2_n=true_sigma2_n(b, sigma),
        s=s,
        omega_trace2=s**4 * tr_sq,
    )


def matrix_autocov(spec, h):
    """Autocovariance Gamma_h of the matrix-coefficient generating model.

    Gamma_h = Sigma^{1/2} (sum_{k=0}^{q-h} A_k A_{k+h}) Sigma^{1/2}, with
    identity innovation covariance. Lags beyond the MA order return the
    zero matrix. Materialises every A_k, so intended for modest p.
    """
    if h < 0:
        raise ValueError("lag must be non-negative")
    p, q = spec.p, spec.ma.q
    if h > q:
        return np.zeros((p, p))
    inner = np.zeros((p, p))
    coeffs = [build_ma_coefficient(spec.ma, k, p) for k in range(q + 1)]
    for k in range(q - h + 1):
        inner += coeffs[k] @ coeffs[k + h]
    root = psd_sqrt(build_sigma(spec.cov))
    return root @ inner @ root


def mc_null_reference(spec, reps):
    """Brute-force reference: raw T_n values over independent null series.

    Replication r uses the stream derived from (spec.seed, r), the same
    derivation as the Monte Carlo harness, so runs are reproducible.
    """
    if reps < 2:
        raise ValueError("need at least 2 replications")
    if np.any(spec.mean != 0):
        raise ValueError("reference requires a zero-mean process")
    values = np.empty(reps)
    for r in range(reps):
        x = simulate(spec, rng=replication_rng(spec.seed, r))
        values[r] = statistic_tn(x)
    return values
