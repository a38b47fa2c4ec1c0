"""Laplace transforms, generating functions and the jump measure of the
space-fractional variant."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DivergentSeries, DomainError, NonConvergent, Overflow
from ..specfun import SeriesControl, _wright_series, gen_wright_sum
from . import mixture
from .counting import sibuya_powers
from .params import GfnbpParams, SpaceTimeParams


def gfnbp_laplace_wright(u: float, t: float, p: GfnbpParams, ctrl: SeriesControl | None = None,
                         _arg: float | None = None):
    """The published 2psi2 form of ``E exp(-u X(t))``, returned as a :class:`SeriesSum`.

    Blocks ``[(1, -b/a), (rho t, b/a)] / [(1, b), (1, -b)]`` at argument
    ``-lam (1 - e^-u) / mu^(b/a)``, divided by ``G(rho t)``.  This form lacks
    the ``k!`` that the moment expansion carries, so it differs from the
    true transform even at ``alpha = 1``; for ``alpha < 1`` it also runs
    into a numerator pole once ``b k / a`` reaches an integer.  Exposed for
    comparison only.
    """
    a, b, r = p.alpha, p.beta, p.rho * t
    z = -p.lam * (1 - math.exp(-u)) / p.mu ** (b / a) if _arg is None else _arg
    return gen_wright_sum([(1.0, -b / a), (r, b / a)], [(1.0, b), (1.0, -b)], z, ctrl,
                          log_scale=-math.lgamma(r))


def fnbp_transform_series(v: float, t: float, p: GfnbpParams, ctrl: SeriesControl | None = None):
    """``E exp(-v lam E_beta(M(t)))`` at ``alpha = 1`` by its moment series.

    ``sum_k z^k G(rho t + b k) / (G(rho t) G(1 + b k))`` with
    ``z = -v lam / mu^b``; converges only for ``|z| < 1``.
    """
    if p.alpha != 1.0:
        raise DomainError("the moment series of the transform needs alpha = 1")
    b, r = p.beta, p.rho * t
    z = -v * p.lam / p.mu**b
    if abs(z) >= 1.0:
        raise DivergentSeries(f"transform series diverges: |z| = {abs(z):.6g} >= 1",
                              operation="gfnbp_laplace")
    return _wright_series([(1.0, 1.0), (r, b)], [(1.0, b)], z, ctrl,
                          log_scale=-math.lgamma(r), name="gfnbp_laplace")


def gfnbp_laplace(u: float, t: float, p: GfnbpParams, method: str = "auto") -> float:
    """``E exp(-u X(t))`` for ``X = N_beta(M)``.

    Parameters
    ----------
    method : {"auto", "quadrature", "series", "wright"}
        ``quadrature`` evaluates ``E exp(-lam (1 - e^-u) E_beta(M(t)))`` by
        the Poisson-mixture quadrature.  ``series`` sums the moment series,
        available at ``alpha = 1`` inside its disc of convergence.
        ``wright`` evaluates the published 2psi2 form (see
        :func:`gfnbp_laplace_wright`).  ``auto`` uses ``series`` when it is
        available and well conditioned, else ``quadrature``.
    """
    if u < 0 or t < 0:
        raise DomainError("gfnbp_laplace needs u >= 0 and t >= 0")
    if u == 0 or t == 0:
        return 1.0
    return _transform(1 - math.exp(-u), t, p, method, lambda: gfnbp_laplace_wright(u, t, p))


def gfnbp_pgf(u: float, t: float, p: GfnbpParams, method: str = "auto") -> float:
    """``E u^X(t)`` for ``u`` in [0, 1]; same routes as :func:`gfnbp_laplace`."""
    if not 0.0 <= u <= 1.0:
        raise DomainError("gfnbp_pgf needs u in [0, 1]")
    if t < 0:
        raise DomainError("t must be >= 0")
    if u == 1 or t == 0:
        return 1.0
    z = -p.lam * (1 - u) / p.mu ** (p.beta / p.alpha)
    return _transform(1 - u, t, p, method, lambda: gfnbp_laplace_wright(0.0, t, p, _arg=z))


def _transform(v, t, p, method, wright):
    if method == "wright":
        return wright().value
    if method == "series":
        return fnbp_transform_series(v, t, p).value
    if method == "auto" and p.alpha == 1.0:
        try:
            res = fnbp_transform_series(v, t, p)
            if res.cancellation < 1e4:
                return res.value
        except (DivergentSeries, NonConvergent, Overflow):
            pass
    elif method not in ("auto", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    return mixture.mixture_laplace(v, t, p)


def sfgnbp_laplace(u: float, t: float, sp: SpaceTimeParams) -> float:
    """``E exp(-u H(t))`` for ``H = N_a'(M(t), lam)``.

    Composition of the space-fractional Poisson transform
    ``exp(-y lam^a' (1 - e^-u)^a')`` with the clock transform.
    """
    if u < 0 or t < 0:
        raise DomainError("sfgnbp_laplace needs u >= 0 and t >= 0")
    p = sp.base
    s = p.lam ** sp.alpha_prime * (1 - math.exp(-u)) ** sp.alpha_prime
    return math.exp(p.rho * t * (math.log(p.mu) - math.log(p.mu + s ** p.alpha)))


def sfgnbp_laplace_paper(u: float, t: float, sp: SpaceTimeParams) -> float:
    """The published closed form ``exp(-rho t ln(1 + lam^(a'a)(1-e^-u)^(a'a) / alpha))``.

    Kept for comparison only: it has ``alpha`` where the clock scale ``mu``
    belongs and disagrees with :func:`sfgnbp_laplace` unless ``mu = alpha``.
    """
    p = sp.base
    e = sp.alpha_prime * p.alpha
    return math.exp(-p.rho * t * math.log1p(p.lam**e * (1 - math.exp(-u)) ** e / p.alpha))


def sfgnbp_laplace_exponent(u: float, sp: SpaceTimeParams) -> float:
    p = sp.base
    s = p.lam ** sp.alpha_prime * (1 - math.exp(-u)) ** sp.alpha_prime
    return p.rho * math.log1p(s ** p.alpha / p.mu)


def _poisson_levy_weights(m_max: int, p: GfnbpParams, a: float, h: float) -> np.ndarray:
    """``I_m = int e^{-a x} (a x)^m / m! pi(x) dx`` for ``m = 1..m_max``, with pi
    the clock's Levy density ``(alpha rho / x) E_alpha(-mu x^alpha)``."""
    from scipy import special

    m = np.arange(1, m_max + 1, dtype=float)
    v_lo = math.log(1e-17) - math.log(a)
    v_hi = math.log((m_max + 60 + 12 * math.sqrt(m_max)) / a)
    v = v_lo + h * np.arange(int(math.ceil((v_hi - v_lo) / h)) + 1)
    x = np.exp(v)
    if p.alpha == 1.0:
        surv = np.exp(-p.mu * x)
    else:
        # E_alpha(-s) = E exp(-s W), W = E_alpha(1)
        w = mixture.inverse_stable_log_density(p.alpha, h)
        s = p.mu * x ** p.alpha
        surv = np.empty_like(x)
        ew = np.exp(w.grid)
        for i in range(0, x.size, 512):
            surv[i:i + 512] = h * (np.exp(-s[i:i + 512, None] * ew[None, :]) @ w.f)
    logk = m[:, None] * np.log(a * x)[None, :] - a * x[None, :] - special.gammaln(m + 1)[:, None]
    return p.alpha * p.rho * h * (np.exp(logk) @ surv)


def sfgnbp_levy_density(k: int, sp: SpaceTimeParams, method: str = "quadrature",
                        ctrl: SeriesControl | None = None) -> float:
    """Jump-size weight ``V(k)`` of the Levy measure of ``H``.

    ``quadrature`` (default) evaluates ``int P(N_a'(x) = k) pi(x) dx`` using
    the compound form of the space-fractional Poisson pmf.  ``paper`` builds
    the published generalized-Wright form, which the divergence guard
    refuses for ``a' >= alpha`` and which otherwise starts with a numerator
    pole at ``j = 0``.
    """
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    k = int(k)
    p, a1 = sp.base, sp.alpha_prime
    if method == "paper":
        a = p.alpha
        upper = [(1.0, a1), (0.0, 1.0 / a), (1.0, -1.0 / a)]
        lower = [(1.0 - k, a), (1.0, -1.0)]
        z = -p.lam ** a1 / p.mu ** (1.0 / a)
        res = gen_wright_sum(upper, lower, z, ctrl)
        return p.rho * (-1.0) ** k / math.factorial(k) * res.value
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")
    return float(sfgnbp_levy_weights(k, sp)[k - 1])


def sfgnbp_levy_weights(k_max: int, sp: SpaceTimeParams) -> np.ndarray:
    """``V(1), ..., V(k_max)`` by quadrature, refined until stable to 1e-12."""
    p, a1 = sp.base, sp.alpha_prime
    rate = p.lam ** a1
    D = sibuya_powers(a1, k_max)[1:, 1:]

    def at(h):
        return _poisson_levy_weights(k_max, p, rate, h) @ D

    vals, _ = mixture._converged(at, 0.05, 1e-12)
    return vals
