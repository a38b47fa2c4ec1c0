"""Mittag-Leffler Levy subordinator: transform, Levy density, pdf, cdf, moments."""

from __future__ import annotations

import logging
from dataclasses import replace
import math

import numpy as np
from scipy import special

from ..errors import CancellationLoss, DomainError, MomentDiverges, Overflow
from ..specfun import SeriesControl, laplace_invert, ml3_sum, mittag_leffler
from .params import GfnbpParams

log = logging.getLogger(__name__)


def ml_levy_laplace(u: float, t: float, p: GfnbpParams) -> float:
    """``E exp(-u M(t)) = (mu / (mu + u^alpha))^(rho t)``."""
    if u < 0 or t < 0:
        raise DomainError("ml_levy_laplace needs u >= 0 and t >= 0")
    return math.exp(p.rho * t * (math.log(p.mu) - math.log(p.mu + u**p.alpha)))


def ml_levy_levy_density(x: float, p: GfnbpParams) -> float:
    """Levy measure density ``(alpha rho / x) E_alpha(-mu x^alpha)``."""
    if not x > 0:
        raise DomainError("Levy density needs x > 0")
    if p.alpha == 1.0:
        return p.rho * math.exp(-p.mu * x) / x
    return p.alpha * p.rho / x * mittag_leffler(1.0, p.alpha, 1.0, -p.mu * x**p.alpha)


def _laplace_fn(t, p):
    a, rt, lmu = p.alpha, p.rho * t, math.log(p.mu)

    def F(s):
        return np.exp(rt * (lmu - np.log(p.mu + s**a)))
    return F


def _gamma_logpdf(y, t, p):
    rt = p.rho * t
    y = np.asarray(y, dtype=float)
    return rt * math.log(p.mu) + (rt - 1) * np.log(y) - p.mu * y - math.lgamma(rt)


def ml_levy_pdf_array(y, t: float, p: GfnbpParams) -> np.ndarray:
    """Density of M(t) on an array of points ``y > 0`` by transform inversion."""
    y = np.asarray(y, dtype=float)
    if p.alpha == 1.0:
        return np.exp(_gamma_logpdf(y, t, p))
    return laplace_invert(_laplace_fn(t, p), y)


def ml_levy_cdf_array(y, t: float, p: GfnbpParams) -> np.ndarray:
    """``P(M(t) <= y)`` on an array of points ``y > 0``."""
    y = np.asarray(y, dtype=float)
    if p.alpha == 1.0:
        return special.gammainc(p.rho * t, p.mu * y)
    F = _laplace_fn(t, p)
    return laplace_invert(lambda s: F(s) / s, y)


def ml_levy_pdf_series(x: float, t: float, p: GfnbpParams, ctrl: SeriesControl | None = None,
                       max_cancellation: float = 1e12) -> float:
    """Alternating power series of the density; see :func:`ml_levy_pdf`."""
    rt = p.rho * t
    scale = math.exp(rt * math.log(p.mu) + (p.alpha * rt - 1.0) * math.log(x))
    c = ctrl or SeriesControl()
    res = ml3_sum(rt, p.alpha, p.alpha * rt, -p.mu * x**p.alpha,
                  replace(c, abs_tol=c.abs_tol / max(scale, 1.0)))
    if res.cancellation > max_cancellation:
        raise CancellationLoss(
            f"ml_levy_pdf: largest term exceeds the sum by {res.cancellation:.3g}",
            operation="ml_levy_pdf",
        )
    val = scale * res.value
    if val < 0:
        log.warning("ml_levy_pdf: series gave %.3g < 0, clamped to 0", val)
        val = 0.0
    return val


def ml_levy_pdf(x: float, t: float, p: GfnbpParams, method: str = "auto",
                ctrl: SeriesControl | None = None) -> float:
    """Density of M(t) at ``x``.

    Parameters
    ----------
    method : {"auto", "series", "inversion"}
        ``series`` sums the power series (raises CancellationLoss when it is
        numerically useless), ``inversion`` inverts the Laplace transform on a
        parabolic contour, ``auto`` uses the series while it keeps at least
        four digits and inversion otherwise.  At ``alpha = 1`` the gamma
        density is returned for every method.
    """
    if not (x > 0 and t > 0):
        raise DomainError("ml_levy_pdf needs x > 0 and t > 0")
    if p.alpha == 1.0:
        return float(np.exp(_gamma_logpdf(x, t, p)))
    if method == "series":
        return ml_levy_pdf_series(x, t, p, ctrl)
    if method == "auto":
        try:
            return ml_levy_pdf_series(x, t, p, ctrl, max_cancellation=1e4)
        except (CancellationLoss, ArithmeticError):
            pass
    elif method != "inversion":
        raise DomainError(f"unknown method {method!r}")
    return max(float(ml_levy_pdf_array(np.array([x]), t, p)[0]), 0.0)


def ml_levy_cdf(x: float, t: float, p: GfnbpParams) -> float:
    if t <= 0:
        return 1.0
    if x <= 0:
        return 0.0
    return float(np.clip(ml_levy_cdf_array(np.array([x]), t, p)[0], 0.0, 1.0))


def ml_levy_log_moment(l: float, t: float, p: GfnbpParams) -> float:
    """``log E[M(t)^l]`` for ``l > 0`` and ``t > 0``; same domain as :func:`ml_levy_moment`."""
    if not (l > 0 and t > 0):
        raise DomainError("ml_levy_log_moment needs l > 0 and t > 0")
    if p.alpha < 1.0 and l >= p.alpha:
        raise MomentDiverges(
            f"E[M^{l:g}] is infinite for alpha={p.alpha:g} (need l < alpha)",
            operation="ml_levy_moment",
        )
    rt, r = p.rho * t, l / p.alpha
    if p.alpha == 1.0:
        return math.lgamma(rt + l) - math.lgamma(rt) - l * math.log(p.mu)
    # rho t B(1 - l/a, rho t + l/a) / (mu^(l/a) G(1 - l))
    return (math.log(rt) + math.lgamma(1 - r) + math.lgamma(rt + r) - math.lgamma(1 + rt)
            - r * math.log(p.mu) - math.lgamma(1 - l))


def ml_levy_moment(l: float, t: float, p: GfnbpParams) -> float:
    """Fractional moment ``E[M(t)^l]``.

    For ``alpha < 1`` only ``0 <= l < alpha`` is finite.  At ``alpha = 1`` the
    clock is a gamma process and every ``l >= 0`` is served by the gamma
    moment ``G(rho t + l) / (mu^l G(rho t))``.
    """
    if l == 0:
        return 1.0
    if l < 0:
        raise DomainError("ml_levy_moment needs l >= 0")
    if t < 0:
        raise DomainError("ml_levy_moment needs t >= 0")
    if p.alpha < 1.0 and l >= p.alpha:
        raise MomentDiverges(
            f"E[M^{l:g}] is infinite for alpha={p.alpha:g} (need l < alpha)",
            operation="ml_levy_moment",
        )
    if t == 0:
        return 0.0
    lg = ml_levy_log_moment(l, t, p)
    if lg > 709.0:
        raise Overflow(f"E[M^{l:g}] overflows", operation="ml_levy_moment")
    return math.exp(lg)
