"""Goodness-of-fit testing built on spacing estimates of entropy.

The package provides:

- spacing (Vasicek-type) entropy estimation with window diagnostics,
- a Kullback-Leibler-based goodness-of-fit test for ten classical families,
  with asymptotic and Monte-Carlo p-values,
- classical EDF tests (Kolmogorov-Smirnov, Cramer-von Mises,
  Anderson-Darling) against fully specified nulls,
- a declarative power-study harness and a command-line interface.
"""

from .errors import (
    VsgofError,
    DataError,
    ParameterError,
    ConstraintError,
    TiesError,
    EstimationError,
    CapabilityError,
)
from .sample import Sample
from .spacing import WindowScan, vasicek_estimate, window_scan, best_window, max_valid_window
from .distributions import (
    FitResult,
    family_ids,
    resolve_family,
    log_density,
    cdf,
    quantile,
    sample as sample_variates,
    fit_mle,
    closed_form_entropy,
    default_delta,
    param_labels,
)
from .vstest import (
    TestOptions,
    VsTestReport,
    vs_test,
    statistic_at,
    empirical_null_loglik,
    select_window,
    candidate_windows,
    bias_b,
    asymptotic_p_value,
    monte_carlo_p_value,
)
from .edf import EdfTestReport, ks_statistic, cvm_statistic, ad_statistic, edf_mc_p_value, edf_test
from .power import PowerScenario, PowerRow, PowerTable, parse_scenario_file, run_power_study

__version__ = "0.1.0"

__all__ = [
    "VsgofError", "DataError", "ParameterError", "ConstraintError",
    "TiesError", "EstimationError", "CapabilityError",
    "Sample",
    "WindowScan", "vasicek_estimate", "window_scan", "best_window", "max_valid_window",
    "FitResult", "family_ids", "resolve_family", "log_density", "cdf", "quantile",
    "sample_variates", "fit_mle", "closed_form_entropy", "default_delta", "param_labels",
    "TestOptions", "VsTestReport", "vs_test", "statistic_at", "empirical_null_loglik",
    "select_window", "candidate_windows", "bias_b", "asymptotic_p_value", "monte_carlo_p_value",
    "EdfTestReport", "ks_statistic", "cvm_statistic", "ad_statistic", "edf_mc_p_value", "edf_test",
    "PowerScenario", "PowerRow", "PowerTable", "parse_scenario_file", "run_power_study",
    "__version__",
]
