"""Mean, variance and covariance asymptotics of the GFNBP."""

from __future__ import annotations

import math

from ..errors import DomainError
from .levy import ml_levy_moment
from .params import GfnbpParams


def gfnbp_mean(t: float, p: GfnbpParams) -> float:
    """``q E[M(t)^beta]``; finite for ``beta < alpha`` or ``alpha = 1``."""
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return 0.0
    return p.q * ml_levy_moment(p.beta, t, p)


def gfnbp_mean_asymptotic(t: float, p: GfnbpParams) -> float:
    """Large-t form ``q G(1 - b/a) (rho t)^(b/a) / (mu^(b/a) G(1 - b))``."""
    r = p.beta / p.alpha
    return (p.q * math.gamma(1 - r) * (p.rho * t) ** r
            / (p.mu ** r * math.gamma(1 - p.beta)))


def gfnbp_variance(t: float, p: GfnbpParams) -> float:
    """``q m1 - q^2 m1^2 + 2 d m2`` with ``m_j = E[M(t)^(j beta)]``.

    Needs ``2 beta < alpha`` (or ``alpha = 1``); MomentDiverges otherwise.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return 0.0
    m1 = ml_levy_moment(p.beta, t, p)
    m2 = ml_levy_moment(2 * p.beta, t, p)
    return p.q * m1 - (p.q * m1) ** 2 + 2 * p.d * m2


def gfnbp_cov_asymptotic(s: float, t: float, p: GfnbpParams, form: str = "corrected") -> float:
    """Large-t limit of ``Cov[X(s), X(t)]`` at fixed ``s``.

    ``form="corrected"`` returns ``q E[M(s)^beta] + d E[M(s)^(2 beta)]``.
    ``form="as_stated"`` evaluates the first moment at ``t`` instead, as in
    the published statement; that version grows without bound in ``t``.
    """
    if not 0 < s <= t:
        raise DomainError("need 0 < s <= t")
    if form == "corrected":
        first = ml_levy_moment(p.beta, s, p)
    elif form == "as_stated":
        first = ml_levy_moment(p.beta, t, p)
    else:
        raise DomainError(f"unknown form {form!r}")
    return p.q * first + p.d * ml_levy_moment(2 * p.beta, s, p)


def lrd_exponent(p: GfnbpParams) -> float:
    """Power of t in the decay of ``Corr[X(s), X(t)]``: ``-beta/alpha``."""
    return -p.beta / p.alpha
