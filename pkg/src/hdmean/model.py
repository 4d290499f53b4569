"""Simulation model for cross-sectionally and temporally dependent series.

The generating process is a finite moving average

    X_t = mu + Sigma^{1/2} * sum_{h=0}^{q} A_h Z_{t-h},

where Sigma is a banded cross-sectional covariance, the A_h are symmetric
coefficient matrices, and the innovations Z_{t,j} are i.i.d. with mean 0,
variance 1 and finite fourth moment. Everything here is deterministic in
the seed; per-replication streams are derived so that parallel Monte Carlo
runs are reproducible independent of scheduling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NumericalError

GAUSSIAN = "gaussian"
CENTERED_GAMMA = "centered_gamma"


def guarded_ceil(x, tol=1e-9):
    """Ceiling that snaps to the nearest integer first.

    Floating point can turn an exact product like 0.4 * 300 into
    120.00000000000001; a bare ceil would then be off by one.
    """
    nearest = round(x)
    if abs(x - nearest) <= tol:
        return int(nearest)
    return int(math.ceil(x))


@dataclass(frozen=True)
class InnovationLaw:
    """Innovation distribution for the Z_{t,j}: mean 0, variance 1.

    Supported kinds: "gaussian" (standard normal) and "centered_gamma"
    (Gamma(shape, rate) minus its mean shape/rate). The gamma parameters
    must give unit variance, i.e. shape/rate^2 = 1; the default (4, 2)
    has fourth moment 3 + 6/shape = 4.5.
    """

    kind: str = GAUSSIAN
    shape: float = 4.0
    rate: float = 2.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, CENTERED_GAMMA):
            raise ValueError(f"unknown innovation kind: {self.kind!r}")
        if self.kind == CENTERED_GAMMA:
            if self.shape <= 0 or self.rate <= 0:
                raise ValueError("gamma shape and rate must be positive")
            if abs(self.shape / self.rate**2 - 1.0) > 1e-12:
                raise ValueError("innovation variance must equal 1 (shape/rate^2 = 1)")

    @property
    def fourth_moment(self):
        if self.kind == GAUSSIAN:
            return 3.0
        return 3.0 + 6.0 / self.shape

    def sample(self, rng, size):
        """Draw i.i.d. innovations with the law's mean removed."""
        if self.kind == GAUSSIAN:
            return rng.standard_normal(size)
        raw = rng.gamma(self.shape, scale=1.0 / self.rate, size=size)
        return raw - self.shape / self.rate


@dataclass(frozen=True)
class CrossSectionCovSpec:
    """Banded cross-sectional covariance: unit diagonal, phi2/|i-j|^2 for
    1 <= |i-j| <= p*w, zero outside the band."""

    p: int
    w: float = 0.5
    phi2: float = 0.2

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("dimension must be at least 1")
        if not 0 < self.w <= 1:
            raise ValueError("sparsity fraction w must lie in (0, 1]")


@dataclass(frozen=True)
class MACoefficientSpec:
    """Moving-average coefficients A_0..A_q.

    A_0 is the identity; for h in {1, 2} the entries are phi1/h on the
    diagonal and phi1/(h*|i-j|^2) inside the band |i-j| <= p*w; for h > 2
    every entry equals e^{-2h} (a constant matrix, no band restriction).
    """

    q: int
    phi1: float = 0.3
    w: float = 0.5

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("MA order must be non-negative")


@dataclass(frozen=True)
class ProcessSpec:
    """Full description of one simulated process."""

    n: int
    p: int
    mean: np.ndarray
    cov: CrossSectionCovSpec
    ma: MACoefficientSpec
    innovation: InnovationLaw
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 observations")
        mean = np.asarray(self.mean, dtype=np.float64)
        if mean.shape != (self.p,):
            raise ValueError(f"mean must have length p={self.p}")
        object.__setattr__(self, "mean", mean)
        if self.cov.p != self.p:
            raise ValueError("covariance spec dimension does not match p")
        if self.ma.q > self.n - 1:
            warnings.warn("MA order exceeds n-1; extra lags still simulated", stacklevel=2)


def make_process(n, p, q, innovation=InnovationLaw(), mean=None, seed=0,
                 w=0.5, phi1=0.3, phi2=0.2):
    """Convenience constructor with the simulation study's default
    dependence parameters (w, phi1, phi2) = (0.5, 0.3, 0.2)."""
    if mean is None:
        mean = np.zeros(p)
    return ProcessSpec(
        n=n, p=p, mean=mean,
        cov=CrossSectionCovSpec(p=p, w=w, phi2=phi2),
        ma=MACoefficientSpec(q=q, phi1=phi1, w=w),
        innovation=innovation, seed=seed,
    )


def replication_rng(seed, rep=None):
    """Counter-based generator for a (seed, replication) pair.

    Distinct (seed, rep) pairs give independent streams, so replications
    can run in any order or in parallel with identical results.
    """
    entropy = [int(seed)] if rep is None else [int(seed), int(rep)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def build_sigma(spec):
    """Construct the banded covariance matrix Sigma from its spec."""
    p, w, phi2 = spec.p, spec.w, spec.phi2
    d = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    with np.errstate(divide="ignore"):
        off = np.where((d >= 1) & (d <= p * w), phi2 / np.maximum(d, 1) ** 2, 0.0)
    np.fill_diagonal(off, 1.0)
    return off


def build_ma_coefficient(spec, h, p):
    """Construct the lag-h coefficient matrix A_h (p x p, symmetric)."""
    if h < 0 or h > spec.q:
        raise ValueError("lag exceeds MA order")
    if h == 0:
        return np.eye(p)
    if h > 2:
        return np.full((p, p), math.exp(-2.0 * h))
    d = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    a = np.where((d >= 1) & (d <= p * spec.w),
                 spec.phi1 / (h * np.maximum(d, 1) ** 2), 0.0)
    np.fill_diagonal(a, spec.phi1 / h)
    return a


def psd_sqrt(s):
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-eps, 0) with eps = 1e-8 * max eigenvalue are clamped
    to zero; anything more negative raises NumericalError.
    """
    s = np.asarray(s, dtype=np.float64)
    vals, vecs = np.linalg.eigh(s)
    clamp = 1e-8 * max(float(vals.max(initial=0.0)), 0.0)
    if float(vals.min()) < -clamp:
        raise NumericalError("matrix not positive semi-definite")
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ vecs.T
    return (root + root.T) / 2.0


@lru_cache(maxsize=64)
def _cached_sigma_root(p, w, phi2):
    root = psd_sqrt(build_sigma(CrossSectionCovSpec(p=p, w=w, phi2=phi2)))
    root.setflags(write=False)
    return root


@lru_cache(maxsize=64)
def _cached_ma(h, p, q, phi1, w):
    a = build_ma_coefficient(MACoefficientSpec(q=q, phi1=phi1, w=w), h, p)
    a.setflags(write=False)
    return a


def simulate(spec, rng=None):
    """Simulate the n x p series for a ProcessSpec.

    The recursion is initialised exactly with q pre-sample innovation
    vectors, so the output is strictly stationary from the first row.
    Lags h > 2 have constant coefficient matrices c*J whose action on a
    vector is c * sum(z) * 1, computed in O(p) without materialising J.
    """
    if rng is None:
        rng = replication_rng(spec.seed)
    n, p, q = spec.n, spec.p, spec.ma.q
    z = spec.innovation.sample(rng, (q + n, p))
    w = np.array(z[q:], dtype=np.float64, copy=True)
    for h in (1, 2):
        if h <= q:
            w += z[q - h: q + n - h] @ _cached_ma(h, p, q, spec.ma.phi1, spec.ma.w)
    if q > 2:
        row_sums = z.sum(axis=1)
        kernel = np.zeros(q + 1)
        kernel[3:] = np.exp(-2.0 * np.arange(3, q + 1))
        tail = np.convolve(row_sums, kernel)[q: q + n]
        w += tail[:, None]
    x = w @ _cached_sigma_root(p, spec.cov.w, spec.cov.phi2)
    x += spec.mean
    return x


def build_mean_signal(p, nu, phi3, omega=1.0):
    """Sparse mean vector: the first ceil(nu*p) coordinates equal
    omega*phi3, the rest are zero."""
    if not 0 < nu <= 1:
        raise ValueError("sparsity nu must lie in (0, 1]")
    k = guarded_ceil(nu * p)
    mean = np.zeros(p)
    mean[:k] = omega * phi3
    return mean
