"""Mean testing for high-dimensional time series with temporal dependence.

A library and CLI for testing H0: mu = 0 on an n x p stationary series:
the pair-sum test statistic with Gram-matrix estimators, two baseline
tests (band-excluded U-statistic, diagonal-standardised i.i.d. test), a
simulation lab for banded moving-average processes, and a Monte Carlo
harness for size/power/timing studies.
"""

from .baselines import ZcqConfig, qs_kernel, sri_test, zcq_statistic, zcq_test
from .errors import NumericalError
from .harness import (SCENARIOS, MonteCarloReport, ScenarioSpec, TimingReport,
                      ks_normality_check, run_power_experiment,
                      run_size_experiment, run_timing_benchmark, scenario)
from .model import (CrossSectionCovSpec, InnovationLaw, MACoefficientSpec,
                    ProcessSpec, build_ma_coefficient, build_mean_signal,
                    build_sigma, make_process, psd_sqrt, replication_rng,
                    simulate)
from .oracle import (OracleQuantities, ScalarLinearProcess, acov_coeff,
                     matrix_autocov, mc_null_reference, oracle_quantities,
                     true_mu_n, true_sigma2_n)
from .testcore import (TestConfig, TestResult, build_gram, mu_hat,
                       rolling_test, run_test, s_h1h2, select_m, sigma2_hat,
                       statistic_tn, trace_gamma_hat)

__version__ = "0.1.0"

__all__ = [
    "CrossSectionCovSpec", "InnovationLaw", "MACoefficientSpec",
    "MonteCarloReport", "NumericalError", "OracleQuantities", "ProcessSpec",
    "SCENARIOS", "ScalarLinearProcess", "ScenarioSpec", "TestConfig",
    "TestResult", "TimingReport", "ZcqConfig", "acov_coeff",
    "build_gram", "build_ma_coefficient", "build_mean_signal", "build_sigma",
    "ks_normality_check", "make_process", "matrix_autocov",
    "mc_null_reference", "mu_hat", "oracle_quantities", "psd_sqrt",
    "qs_kernel", "replication_rng", "rolling_test", "run_power_experiment",
    "run_size_experiment", "run_test", "run_timing_benchmark", "s_h1h2",
    "scenario", "select_m", "sigma2_hat", "simulate", "sri_test",
    "statistic_tn", "trace_gamma_hat", "true_mu_n", "true_sigma2_n",
    "zcq_statistic", "zcq_test",
]
