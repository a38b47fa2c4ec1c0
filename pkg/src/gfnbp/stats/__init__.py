"""Estimators and the verification battery."""

from .estimators import (
    LrdFit,
    correlations,
    dispersion_index,
    empirical_cov,
    empirical_laplace,
    empirical_moment,
    empirical_pmf,
    fit_power_law,
    ks_two_sample,
    lrd_fit,
    tv_distance,
)
from .verification import Budget, VerificationReport, child_seed, verify_suite
