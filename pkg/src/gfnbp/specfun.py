"""Scalar special functions with explicit series-truncation control.

Every infinite series used by the analytic layer goes through one engine,
:func:`_wright_series`, which sums gamma-ratio terms in log space with sign
tracking and stops on a monotone-tail certificate.  Large negative arguments,
where the alternating series lose all precision to cancellation, are served
by numerical inversion of the corresponding Laplace transform along a
parabolic contour (:func:`laplace_invert`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import (
    DivergentSeries,
    DomainError,
    NonConvergent,
    NumeratorPole,
    Overflow,
)

_POLE_EPS = 1e-12
_CHUNK = 64
_ZERO_RUN = 256


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the power series in this module.

    ``abs_tol`` bounds the last retained term, ``max_terms`` caps the work and
    ``overflow_guard`` caps the magnitude of any single term.
    """

    max_terms: int = 2000
    abs_tol: float = 1e-12
    overflow_guard: float = 1e250

    def __post_init__(self):
        if int(self.max_terms) < 1:
            raise DomainError("max_terms must be >= 1")
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be > 0")
        if not self.overflow_guard > 0:
            raise DomainError("overflow_guard must be > 0")


DEFAULT_CONTROL = SeriesControl()


@dataclass(frozen=True)
class SeriesSum:
    value: float
    n_terms: int
    max_term: float
    last_term: float

    @property
    def cancellation(self) -> float:
        """Ratio of the largest term to the magnitude of the sum."""
        if self.max_term == 0.0:
            return 1.0
        if self.value == 0.0:
            return math.inf
        return self.max_term / abs(self.value)


def _is_nonpositive_int(x):
    x = np.asarray(x, dtype=float)
    r = np.rint(x)
    return (r <= 0) & (np.abs(x - r) < _POLE_EPS)


def _cancel_pairs(upper, lower):
    upper = [(float(a), float(A)) for a, A in upper]
    lower = [(float(b), float(B)) for b, B in lower]
    kept = []
    for pair in upper:
        if pair in lower:
            lower.remove(pair)
        else:
            kept.append(pair)
    return kept, lower


def _done(terms, max_term, nonzero):
    return SeriesSum(value=math.fsum(terms), n_terms=len(terms), max_term=max_term,
                     last_term=nonzero[-1] if nonzero else 0.0)


def _wright_series(upper, lower, z, ctrl=None, log_scale=0.0, name="series"):
    """Sum ``exp(log_scale) * sum_k z^k/k! * prod G(a+Ak) / prod G(b+Bk)``.

    Terms whose denominator gamma sits on a pole vanish; a numerator pole
    raises :class:`NumeratorPole`.
    """
    ctrl = ctrl or DEFAULT_CONTROL
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"{name}: argument must be finite")
    log_guard = math.log(ctrl.overflow_guard)
    log_abs_z = math.log(abs(z)) if z != 0.0 else -math.inf
    sign_z = -1.0 if z < 0 else 1.0

    terms: list[float] = []
    nonzero: list[float] = []
    max_term = 0.0
    zero_run = 0
    k0 = 0
    while k0 < ctrl.max_terms:
        k = np.arange(k0, min(k0 + _CHUNK, ctrl.max_terms), dtype=float)
        logmag = np.full(k.shape, log_scale) - special.gammaln(k + 1.0)
        with np.errstate(invalid="ignore"):
            logmag += np.where(k == 0, 0.0, k * log_abs_z)
        sign = np.where(k % 2 == 1, sign_z, 1.0)
        for a, A in upper:
            arg = a + A * k
            if np.any(_is_nonpositive_int(arg)):
                kk = int(k[np.argmax(_is_nonpositive_int(arg))])
                raise NumeratorPole(
                    f"{name}: numerator gamma pole at k={kk} (argument {a}+{A}*k)",
                    operation=name,
                )
            logmag += special.gammaln(arg)
            sign = sign * special.gammasgn(arg)
        for b, B in lower:
            arg = b + B * k
            pole = _is_nonpositive_int(arg)
            safe = np.where(pole, 1.0, arg)
            logmag -= np.where(pole, 0.0, special.gammaln(safe))
            sign = np.where(pole, 0.0, sign * special.gammasgn(safe))
        if z == 0.0:
            sign = np.where(k == 0, sign, 0.0)
        live = sign != 0
        if np.any(logmag[live] > log_guard):
            raise Overflow(f"{name}: term magnitude exceeds overflow guard", operation=name)
        vals = np.where(live, sign * np.exp(np.where(live, logmag, -np.inf)), 0.0)
        for v in vals:
            m = abs(float(v))
            terms.append(float(v))
            max_term = max(max_term, m)
            if m == 0.0:
                zero_run += 1
                # a long run of vanishing terms means the series terminated
                if z == 0.0 or zero_run >= _ZERO_RUN:
                    return _done(terms, max_term, nonzero)
                continue
            zero_run = 0
            nonzero.append(m)
            # monotone-tail certificate: three consecutive decreases among
            # the non-vanishing terms, and the current term below tolerance
            if (m < ctrl.abs_tol and len(nonzero) >= 4
                    and nonzero[-1] <= nonzero[-2] <= nonzero[-3] <= nonzero[-4]):
                return _done(terms, max_term, nonzero)
        k0 += len(k)
    raise NonConvergent(
        f"{name}: terms still above abs_tol={ctrl.abs_tol:g} after {ctrl.max_terms} terms",
        operation=name,
    )


def _check_delta(upper, lower, name):
    delta = sum(B for _, B in lower) - sum(A for _, A in upper)
    if delta <= -1.0 + 1e-12:
        raise DivergentSeries(
            f"{name}: Delta = {delta:.6g} <= -1, the series is divergent or only asymptotic",
            operation=name,
        )
    return delta


def wright_delta(upper, lower) -> float:
    """Convergence index ``sum(B_j) - sum(A_i)`` of a generalized Wright series."""
    upper, lower = _cancel_pairs(upper, lower)
    return sum(B for _, B in lower) - sum(A for _, A in upper)


def gen_wright_sum(upper, lower, z, ctrl=None, log_scale: float = 0.0) -> SeriesSum:
    """Like :func:`gen_wright` but returns the full :class:`SeriesSum` record.

    ``log_scale`` multiplies every term by ``exp(log_scale)`` before the
    overflow guard is applied.
    """
    upper, lower = _cancel_pairs(upper, lower)
    _check_delta(upper, lower, "gen_wright")
    return _wright_series(upper, lower, z, ctrl, log_scale=log_scale, name="gen_wright")


def gen_wright(upper: Sequence[tuple[float, float]], lower: Sequence[tuple[float, float]],
               z: float, ctrl: SeriesControl | None = None) -> float:
    """Generalized Wright function pPsi_q.

    ``sum_k z^k/k! * prod_i G(a_i + A_i k) / prod_j G(b_j + B_j k)``.

    Identical (a, A) pairs appearing in both lists cancel before evaluation.
    Series with ``Delta = sum B - sum A <= -1`` are refused.
    """
    return gen_wright_sum(upper, lower, z, ctrl).value


def ml3_sum(a, b, g, z, ctrl=None) -> SeriesSum:
    if not (a > 0 and b > 0 and g > 0):
        raise DomainError("ml3 requires positive parameters")
    return _wright_series([(a, 1.0)], [(g, b)], z, ctrl,
                          log_scale=-math.lgamma(a), name="ml3")


def ml3(a: float, b: float, g: float, z: float, ctrl: SeriesControl | None = None) -> float:
    """Three-parameter (Prabhakar) Mittag-Leffler function by its power series.

    ``sum_k z^k G(a+k) / (k! G(a) G(g+b k))``.  For large negative ``z`` the
    series cancels catastrophically; use :func:`mittag_leffler` there.
    """
    return ml3_sum(a, b, g, z, ctrl).value


def m_wright(a: float, z: float, ctrl: SeriesControl | None = None) -> float:
    """Mainardi M-Wright function ``sum_k (-z)^k / (k! G(1 - a - a k))``."""
    if not 0 < a < 1:
        raise DomainError("m_wright requires 0 < a < 1")
    return _wright_series([], [(1.0 - a, -a)], -z, ctrl, name="m_wright").value


# -- Laplace inversion ------------------------------------------------------

def laplace_invert(transform: Callable[[np.ndarray], np.ndarray], t, n_nodes: int = 32):
    """Invert a Laplace transform of a real function at times ``t > 0``.

    Trapezoidal rule on the Weideman-Trefethen parabolic contour.  The
    transform must be analytic off the negative real axis.  It is called with
    complex nodes of shape ``t.shape + (n_nodes // 2,)`` and may return extra
    leading axes; the result then has shape ``leading + t.shape``.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise DomainError("laplace_invert needs t > 0")
    h = 2.0 * np.pi / n_nodes
    theta = -np.pi + (np.arange(n_nodes // 2, n_nodes) + 0.5) * h
    z0 = 0.1309 - 0.1194 * theta**2 + 0.25j * theta
    dz0 = -0.2388 * theta + 0.25j
    scale = (n_nodes / t_arr)[..., None]
    s = scale * z0
    weight = np.exp(s * t_arr[..., None]) * scale * dz0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        vals = transform(s)
        out = (h / np.pi) * np.imag(vals * weight).sum(axis=-1)
    return out


def ml3_contour(a, b, g, x, n_nodes: int = 32):
    """``E^a_{b,g}(-x)`` for ``x >= 0`` (array-aware) by Laplace inversion.

    Uses ``L[t^(g-1) E^a_{b,g}(-t^b)](s) = s^(ab-g) / (1+s^b)^a``.
    Requires ``0 < b <= 1``.
    """
    if not 0 < b <= 1:
        raise DomainError("ml3_contour requires 0 < b <= 1")
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    zero = x == 0
    out[zero] = 1.0 / math.gamma(g)
    if np.any(~zero):
        tau = x[~zero] ** (1.0 / b)

        def tr(s):
            sb = s**b
            return np.exp((a * b - g) * np.log(s) - a * np.log1p(sb))

        out[~zero] = tau ** (1.0 - g) * laplace_invert(tr, tau, n_nodes)
    return out if out.ndim else float(out)


def mittag_leffler(a: float, b: float, g: float, z: float, ctrl: SeriesControl | None = None,
                   max_cancellation: float = 1e4) -> float:
    """Prabhakar function choosing the stable route automatically.

    The power series is used when it keeps at least ``1/max_cancellation``
    relative precision; otherwise, for ``z < 0`` and ``b <= 1``, the contour
    inversion is used.
    """
    if z >= 0 or b > 1:
        return ml3(a, b, g, z, ctrl)
    try:
        res = ml3_sum(a, b, g, z, ctrl)
        if res.cancellation <= max_cancellation:
            return res.value
    except (NonConvergent, Overflow):
        pass
    return float(ml3_contour(a, b, g, -z))


# -- gamma family -----------------------------------------------------------

def log_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError("log_gamma requires x > 0")
    return math.lgamma(x)


def digamma(x: float) -> float:
    if not x > 0:
        raise DomainError("digamma requires x > 0")
    return float(special.digamma(x))


def beta_fn(z1: float, z2: float) -> float:
    """Complete beta function through log-gamma."""
    if not (z1 > 0 and z2 > 0):
        raise DomainError("beta_fn requires positive arguments")
    return math.exp(math.lgamma(z1) + math.lgamma(z2) - math.lgamma(z1 + z2))


def inc_beta(r: float, s: float, x: float) -> float:
    """Lower incomplete beta integral ``int_0^x t^(r-1) (1-t)^(s-1) dt`` (not regularized)."""
    if not (r > 0 and s > 0):
        raise DomainError("inc_beta requires r, s > 0")
    if not 0.0 <= x <= 1.0:
        raise DomainError("inc_beta requires x in [0, 1]")
    if x == 1.0:
        return beta_fn(r, s)
    return float(special.betainc(r, s, x)) * beta_fn(r, s)
