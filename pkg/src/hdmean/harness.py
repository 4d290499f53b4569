"""Monte Carlo harness: empirical size, power, timing, and normality
diagnostics for the implemented tests.

Replication r of a run with master seed s draws its innovations from the
stream derived from (s, r), so reports are identical for any degree of
parallelism; all methods see the same simulated series within a
replication (common random numbers). Failed replications are counted per
method and excluded from rejection rates. Per-replication timings cover
the test pipeline only (Gram + estimators + decision); simulation time is
reported separately.

Worker count: the HDMEAN_THREADS environment variable caps the number of
worker processes (0 or unset = one worker per CPU).
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.stats import kstest

from .baselines import ZcqConfig, sri_test, zcq_test
from .errors import NumericalError
from .model import InnovationLaw, build_mean_signal, make_process, replication_rng, simulate
from .testcore import TestConfig, run_test

#: scenario label -> (n, p, q, omega)
SCENARIOS = {
    "S1": (250, 300, 0, 1.0),
    "S2": (250, 300, 2, 0.4),
    "S3": (250, 300, 249, 0.005),
    "S4": (250, 100, 0, 1.0),
    "S5": (250, 100, 2, 0.4),
    "S6": (250, 100, 249, 0.005),
}

METHODS = ("tn", "zcq", "sri")


@dataclass(frozen=True)
class ScenarioSpec:
    """One Monte Carlo experiment: design triple, signal, and run controls."""

    n: int
    p: int
    q: int
    innovation: InnovationLaw = InnovationLaw()
    nu: float = 0.2
    phi3: float = 0.0
    omega: float = 1.0
    reps: int = 1000
    seed: int = 0
    methods: tuple = ("tn",)
    alpha: float = 0.05
    label: str = ""

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("need at least 1 replication")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")

    def describe(self):
        sig = f" nu={self.nu} phi3={self.phi3} omega={self.omega}" if self.phi3 else ""
        tag = f"{self.label} " if self.label else ""
        return f"{tag}n={self.n} p={self.p} q={self.q} {self.innovation.kind}{sig}"


def scenario(label, innovation=InnovationLaw(), nu=0.2, phi3=0.0,
             reps=1000, seed=0, methods=("tn",), alpha=0.05):
    """Expand a scenario label S1..S6 into a full ScenarioSpec."""
    if label not in SCENARIOS:
        raise ValueError(f"unknown scenario {label!r}; valid: {', '.join(SCENARIOS)}")
    n, p, q, omega = SCENARIOS[label]
    return ScenarioSpec(n=n, p=p, q=q, innovation=innovation, nu=nu, phi3=phi3,
                        omega=omega, reps=reps, seed=seed, methods=tuple(methods),
                        alpha=alpha, label=label)


@dataclass
class MethodSummary:
    method: str
    reps: int
    failures: int
    reject_rate: float
    se: float
    ks: float | None
    time_mean_s: float
    time_total_s: float

    @property
    def ci99(self):
        """99% binomial confidence interval for the rejection rate."""
        half = 2.5758293035489004 * self.se
        return (max(0.0, self.reject_rate - half), min(1.0, self.reject_rate + half))


@dataclass
class MonteCarloReport:
    scenario: ScenarioSpec
    methods: dict
    sim_time_total_s: float
    z_values: dict = field(repr=False, default_factory=dict)

    def json_rows(self):
        rows = []
        for summary in self.methods.values():
            rows.append({
                "scenario": self.scenario.describe(),
                "method": summary.method,
                "reps": summary.reps,
                "failures": summary.failures,
                "reject_rate": summary.reject_rate,
                "se": summary.se,
                "ks": summary.ks,
                "time_mean_s": summary.time_mean_s,
                "time_total_s": summary.time_total_s,
            })
        return rows

    def to_json(self):
        return json.dumps(self.json_rows(), indent=2)

    def text(self):
        header = (f"{'method':<8}{'reps':>6}{'fail':>6}{'reject%':>9}{'se%':>7}"
                  f"{'ci99%':>17}{'ks':>8}{'t_mean_s':>11}{'t_total_s':>12}")
        lines = [self.scenario.describe(), header]
        for s in self.methods.values():
            lo, hi = s.ci99
            ks = f"{s.ks:.3f}" if s.ks is not None else "-"
            lines.append(
                f"{s.method:<8}{s.reps:>6}{s.failures:>6}{100 * s.reject_rate:>9.2f}"
                f"{100 * s.se:>7.2f}{f'[{100 * lo:.1f}, {100 * hi:.1f}]':>17}"
                f"{ks:>8}{s.time_mean_s:>11.4f}{s.time_total_s:>12.2f}"
            )
        lines.append(f"simulation total: {self.sim_time_total_s:.2f} s")
        return "\n".join(lines)


def _run_tn(x, alpha):
    return run_test(x, TestConfig(alpha=alpha))


def _run_zcq(x, alpha):
    return zcq_test(x, ZcqConfig(), alpha)


def _run_sri(x, alpha):
    return sri_test(x, alpha)


_METHODS = {"tn": _run_tn, "zcq": _run_zcq, "sri": _run_sri}


def _process_spec(spec):
    mean = build_mean_signal(spec.p, spec.nu, spec.phi3, spec.omega)
    return make_process(spec.n, spec.p, spec.q, innovation=spec.innovation,
                        mean=mean, seed=spec.seed)


def _run_replication(spec, rep):
    """Simulate one series and run every requested method on it."""
    proc = _process_spec(spec)
    t0 = time.perf_counter()
    x = simulate(proc, rng=replication_rng(spec.seed, rep))
    out = {"sim_s": time.perf_counter() - t0}
    for name in spec.methods:
        try:
            res = _METHODS[name](x, spec.alpha)
            out[name] = (bool(res.reject), float(res.z), float(res.elapsed))
        except (ValueError, NumericalError, np.linalg.LinAlgError) as exc:
            out[name] = {"error": str(exc)}
    return out


def _resolve_workers(workers, reps):
    if workers is None:
        env = os.environ.get("HDMEAN_THREADS", "").strip()
        cap = int(env) if env else 0
        workers = (os.cpu_count() or 1) if cap == 0 else cap
    return max(1, min(int(workers), reps))


def _collect(spec, workers):
    workers = _resolve_workers(workers, spec.reps)
    task = partial(_run_replication, spec)
    if workers == 1:
        results = [task(r) for r in range(spec.reps)]
    else:
        chunk = max(1, spec.reps // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, range(spec.reps), chunksize=chunk))
    return results


def _summarise(spec, results, with_ks):
    methods = {}
    z_values = {}
    for name in spec.methods:
        rejects = []
        zs = []
        times = []
        failures = 0
        for res in results:  # fixed replication order
            entry = res[name]
            if isinstance(entry, dict):
                failures += 1
                continue
            reject, z, elapsed = entry
            rejects.append(reject)
            zs.append(z)
            times.append(elapsed)
        successes = len(rejects)
        rate = sum(rejects) / successes if successes else math.nan
        se = math.sqrt(rate * (1.0 - rate) / successes) if successes else math.nan
        ks = None
        if with_ks and successes >= 100:
            ks = float(kstest(np.asarray(zs), "norm").statistic)
        methods[name] = MethodSummary(
            method=name, reps=spec.reps, failures=failures, reject_rate=rate,
            se=se, ks=ks, time_mean_s=(sum(times) / successes if successes else math.nan),
            time_total_s=math.fsum(times),
        )
        z_values[name] = np.asarray(zs)
    sim_total = math.fsum(res["sim_s"] for res in results)
    return MonteCarloReport(scenario=spec, methods=methods,
                            sim_time_total_s=sim_total, z_values=z_values)


def run_size_experiment(spec, workers=None):
    """Empirical size under the null (requires a zero mean signal)."""
    if spec.phi3 != 0:
        raise ValueError("size experiment requires phi3 = 0")
    results = _collect(spec, workers)
    return _summarise(spec, results, with_ks=True)


def run_power_experiment(spec, workers=None):
    """Empirical power under the sparse-mean alternative (phi3 > 0)."""
    if spec.phi3 <= 0:
        raise ValueError("power experiment requires phi3 > 0")
    results = _collect(spec, workers)
    return _summarise(spec, results, with_ks=False)


@dataclass
class TimingReport:
    rows: list

    def json_rows(self):
        return self.rows

    def to_json(self):
        return json.dumps(self.rows, indent=2)

    def text(self):
        lines = [f"{'scenario':<40}{'method':<8}{'time_mean_s':>12}{'time_total_s':>14}"]
        for row in self.rows:
            if row.get("method") == "ratio":
                lines.append(f"{row['scenario']:<40}{'ratio':<8}"
                             f"{row['zcq_over_tn']:>12.1f}{'':>14}")
            else:
                lines.append(f"{row['scenario']:<40}{row['method']:<8}"
                             f"{row['time_mean_s']:>12.4f}{row['time_total_s']:>14.2f}")
        return "\n".join(lines)


def run_timing_benchmark(specs, reps, workers=1):
    """Per-replication wall-time of each method's test pipeline.

    Runs serially by default so the measurements are not distorted by
    worker contention. Emits a zcq_over_tn ratio row per scenario when
    both methods are requested.
    """
    if reps < 10:
        raise ValueError("need at least 10 replications for timing")
    rows = []
    for spec in specs:
        spec = dataclasses.replace(spec, reps=reps)
        results = _collect(spec, workers)
        report = _summarise(spec, results, with_ks=False)
        means = {}
        for name, summary in report.methods.items():
            means[name] = summary.time_mean_s
            rows.append({
                "scenario": spec.describe(), "method": name, "reps": reps,
                "time_mean_s": summary.time_mean_s,
                "time_total_s": summary.time_total_s,
            })
        if "tn" in means and "zcq" in means and means["tn"] > 0:
            rows.append({
                "scenario": spec.describe(), "method": "ratio",
                "zcq_over_tn": means["zcq"] / means["tn"],
            })
    return TimingReport(rows=rows)


def ks_normality_check(z_values, threshold=0.08):
    """Two-sided Kolmogorov-Smirnov distance of a sample to N(0, 1).

    Returns (distance, passed) where passed means distance < threshold.
    """
    z = np.asarray(z_values, dtype=np.float64)
    if z.size < 100:
        raise ValueError("need at least 100 values")
    if not np.all(np.isfinite(z)):
        raise ValueError("sample contains non-finite values")
    distance = float(kstest(z, "norm").statistic)
    return distance, distance < threshold
