"""Estimators over ensembles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from ..analytic.params import PmfTable
from ..errors import DegenerateCorrelation, DomainError
from ..simulate.paths import Ensemble

EMPIRICAL_N_CAP = 5000


def _column(e: Ensemble, t: float) -> np.ndarray:
    return np.asarray(e.at(t))


def _mean_se(x: np.ndarray):
    n = x.size
    m = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return m, se


def empirical_pmf(e: Ensemble, t: float, n_max: int | None = None) -> PmfTable:
    """Relative frequencies of the counts at ``t`` on ``0..n_max``.

    ``tail_bound`` is the fraction of paths above ``n_max``.  The default
    ``n_max`` is the largest observed count, capped at 5000.
    """
    x = _column(e, t).astype(np.int64)
    if np.any(x < 0):
        raise DomainError("empirical_pmf needs nonnegative counts")
    if n_max is None:
        n_max = int(min(x.max(), EMPIRICAL_N_CAP))
    clipped = np.minimum(x, n_max + 1)
    freq = np.bincount(clipped, minlength=n_max + 2) / x.size
    return PmfTable(t=float(t), probs=freq[: n_max + 1], tail_bound=float(freq[n_max + 1]),
                    method="empirical", meta={"n_paths": int(x.size), "tail_kind": "frequency"})


def tv_distance(a: PmfTable, b: PmfTable) -> float:
    """``1/2 sum |a_n - b_n| + 1/2 |tail_a - tail_b|`` on the common support."""
    n = max(a.n_max, b.n_max)
    pa, pb = a.padded(n), b.padded(n)
    return 0.5 * math.fsum(np.abs(pa - pb)) + 0.5 * abs(a.tail_bound - b.tail_bound)


def empirical_moment(e: Ensemble, t: float, order: float):
    """Sample mean of ``X(t)^order`` and its plug-in standard error."""
    if not order > 0:
        raise DomainError("order must be > 0")
    return _mean_se(_column(e, t).astype(float) ** order)


def empirical_laplace(e: Ensemble, t: float, u: float):
    """Sample mean of ``exp(-u X(t))`` and its plug-in standard error."""
    if u < 0:
        raise DomainError("u must be >= 0")
    if u == 0:
        return 1.0, 0.0
    return _mean_se(np.exp(-u * _column(e, t).astype(float)))


def empirical_cov(e: Ensemble, s: float, t: float):
    """Unbiased sample covariance of ``X(s)`` and ``X(t)`` with a plug-in standard error."""
    if s > t:
        raise DomainError("need s <= t")
    x = _column(e, s).astype(float)
    y = _column(e, t).astype(float)
    n = x.size
    if n < 2:
        raise DomainError("need at least two paths")
    prod = (x - x.mean()) * (y - y.mean())
    cov = float(prod.sum() / (n - 1))
    return cov, float(np.std(prod, ddof=1) / math.sqrt(n))


def dispersion_index(e: Ensemble, t: float):
    """``Var - Mean`` at ``t`` with a delta-method standard error.

    The influence function of the estimator is
    ``(X - m)^2 - (X - m) - (Var - Mean)``.
    """
    x = _column(e, t).astype(float)
    n = x.size
    if n < 2:
        raise DomainError("need at least two paths")
    d = x - x.mean()
    est = float(x.var(ddof=1) - x.mean())
    se = float(np.std(d * d - d, ddof=1) / math.sqrt(n))
    return est, se


@dataclass(frozen=True)
class LrdFit:
    slope: float
    slope_stderr: float
    r_squared: float
    t_points: tuple
    s_fixed: float

    def as_dict(self):
        return {"slope": self.slope, "slope_stderr": self.slope_stderr,
                "r_squared": self.r_squared, "t_points": list(self.t_points),
                "s_fixed": self.s_fixed}


def _check_lrd_points(s_fixed, t_points):
    t = np.asarray(t_points, dtype=float)
    if not s_fixed > 0:
        raise DomainError("s_fixed must be > 0")
    if t.size < 4:
        raise DomainError("need at least 4 t_points")
    if np.any(t <= s_fixed):
        raise DomainError("all t_points must exceed s_fixed")
    if t.max() / t.min() < 10.0 - 1e-12:
        raise DomainError("t_points must span at least one decade")
    return t


def fit_power_law(t_points, corr, s_fixed: float) -> LrdFit:
    """OLS of ``log corr`` on ``log t``; non-positive correlations are dropped."""
    t = _check_lrd_points(s_fixed, t_points)
    c = np.asarray(corr, dtype=float)
    keep = c > 0
    if keep.sum() < 4:
        raise DegenerateCorrelation(
            f"only {int(keep.sum())} of {c.size} correlations are positive; need 4"
        )
    res = sps.linregress(np.log(t[keep]), np.log(c[keep]))
    return LrdFit(slope=float(res.slope), slope_stderr=float(res.stderr),
                  r_squared=float(min(max(res.rvalue**2, 0.0), 1.0)),
                  t_points=tuple(float(v) for v in t[keep]), s_fixed=float(s_fixed))


def correlations(e: Ensemble, s_fixed: float, t_points) -> np.ndarray:
    x = _column(e, s_fixed).astype(float)
    out = []
    for t in t_points:
        y = _column(e, t).astype(float)
        sx, sy = x.std(), y.std()
        out.append(float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
                   if sx > 0 and sy > 0 else 0.0)
    return np.array(out)


def lrd_fit(e: Ensemble, s_fixed: float = 1.0, t_points=(5, 10, 20, 40, 80)) -> LrdFit:
    """Log-log slope of the sample correlation ``Corr[X(s), X(t)]`` against ``t``."""
    _check_lrd_points(s_fixed, t_points)
    return fit_power_law(t_points, correlations(e, s_fixed, t_points), s_fixed)


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov distance."""
    a, b = np.asarray(a, dtype=float).ravel(), np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise DomainError("samples must be non-empty")
    return float(sps.ks_2samp(a, b).statistic)
