"""Probability mass functions of the counting processes.

The authoritative route for every family is a Poisson mixture over the
random clock (see :mod:`gfnbp.analytic.mixture`); the series forms are kept
for cross-checks and for the reduced cases where they converge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import special, stats

from ..errors import (
    DivergentSeries,
    DomainError,
    MomentDiverges,
    NonConvergent,
    Overflow,
    SeriesWindowEmpty,
)
from ..specfun import SeriesControl, SeriesSum, _wright_series, gen_wright_sum, ml3_sum
from . import mixture
from .levy import ml_levy_log_moment, ml_levy_moment
from .params import GfnbpParams, PmfTable, SpaceTimeParams

_WINDOW_EPS = 1e-12


def _check_nt(n, t):
    if int(n) != n or n < 0:
        raise DomainError("n must be a nonnegative integer")
    if t < 0:
        raise DomainError("t must be >= 0")


def poisson_pmf(n: int, mean: float) -> float:
    if mean == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(mean) - mean - math.lgamma(n + 1))


# -- fractional Poisson ------------------------------------------------------

@lru_cache(maxsize=128)
def _fpp_vector(n_max, t, beta, lam, tol=1e-12):
    def at(h):
        w = mixture.inverse_stable_log_density(beta, h)
        shifted = mixture.LogDensity(w.z0 + beta * math.log(t), h, w.f)
        return mixture.poisson_mixture(n_max, lam, shifted)

    vals, _ = mixture._converged(at, 0.2 * (1 - beta), tol)
    vals.setflags(write=False)
    return vals


def fpp_pmf_vector(n_max: int, t: float, beta: float, lam: float) -> np.ndarray:
    """``P(N_beta(t) = n)`` for ``n = 0..n_max`` by mixing Poisson over E_beta(t)."""
    if t == 0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if beta == 1.0:
        return stats.poisson.pmf(np.arange(n_max + 1), lam * t)
    return np.array(_fpp_vector(int(n_max), float(t), float(beta), float(lam)))


def fpp_pmf(n: int, t: float, p: GfnbpParams, method: str = "auto",
            ctrl: SeriesControl | None = None) -> float:
    """Fractional Poisson pmf ``(lam t^b)^n E^{n+1}_{b, bn+1}(-lam t^b)``.

    ``method="series"`` sums the three-parameter Mittag-Leffler series,
    ``"mixture"`` integrates the Poisson pmf against the inverse-stable
    density, and ``"auto"`` uses the series unless cancellation would cost
    more than about three digits of absolute accuracy.
    """
    _check_nt(n, t)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    b, lam = p.beta, p.lam
    x = lam * t**b
    if b == 1.0:
        return poisson_pmf(n, x)
    if method in ("series", "auto"):
        try:
            scale = math.exp(n * math.log(x)) if n else 1.0
            # the stopping tolerance applies to the scaled pmf, not to the bare series
            c = ctrl or SeriesControl()
            c = replace(c, abs_tol=c.abs_tol / max(scale, 1.0))
            res = ml3_sum(n + 1.0, b, b * n + 1.0, -x, c)
            value = scale * res.value
            if method == "series" or scale * res.max_term < 1e3:
                return value
        except (NonConvergent, Overflow):
            if method == "series":
                raise
    elif method != "mixture":
        raise DomainError(f"unknown method {method!r}")
    return float(fpp_pmf_vector(n, t, b, lam)[n])


# -- GFNBP ------------------------------------------------------------------

def nb_pmf(n: int, t: float, p: GfnbpParams) -> float:
    """Negative binomial pmf, the ``alpha = beta = 1`` member of the family."""
    r = p.rho * t
    if r == 0:
        return 1.0 if n == 0 else 0.0
    lp = math.log(p.mu / (p.mu + p.lam))
    lq = math.log(p.lam / (p.mu + p.lam))
    return math.exp(math.lgamma(r + n) - math.lgamma(r) - math.lgamma(n + 1) + r * lp + n * lq)


def fnbp_pmf_series(n: int, t: float, p: GfnbpParams, ctrl: SeriesControl | None = None,
                    full: bool = False):
    """Gamma-clock (``alpha = 1``) pmf by its power series in ``-lam/mu^beta``.

    The series converges only for ``lam < mu^beta``.  Its terms alternate and
    grow roughly like ``k^n`` before decaying, so the rounding error is about
    ``1e-13 * max_term``; ``full=True`` returns the SeriesSum so callers can
    see ``max_term``.
    """
    _check_nt(n, t)
    if p.alpha != 1.0:
        raise DomainError("the FNBP series needs alpha = 1")
    if t == 0:
        v = 1.0 if n == 0 else 0.0
        return SeriesSum(v, 0, v, 0.0) if full else v
    b, r = p.beta, p.rho * t
    z = -p.lam / p.mu**b
    if abs(z) >= 1.0 - 1e-12:
        raise DivergentSeries(
            f"FNBP series diverges: lam / mu^beta = {abs(z):.6g} >= 1",
            operation="fnbp_pmf_series",
        )
    log_scale = (n * math.log(p.lam) - b * n * math.log(p.mu) - math.lgamma(n + 1) - math.lgamma(r))
    res = _wright_series([(n + 1.0, 1.0), (b * n + r, b)], [(b * n + 1.0, b)], z, ctrl,
                         log_scale=log_scale, name="fnbp_pmf_series")
    return res if full else res.value


def gfnbp_pmf_wright(n: int, t: float, p: GfnbpParams, ctrl: SeriesControl | None = None) -> float:
    """Generalized-Wright form of the pmf.

    Its parameter blocks give ``Delta = -1``, so the divergence guard refuses
    it; the function exists to surface that refusal explicitly.
    """
    _check_nt(n, t)
    a, b, r = p.alpha, p.beta, p.rho * t
    upper = [(n + 1.0, 1.0), (1 - b * n / a, -b / a), (r + b * n / a, b / a)]
    lower = [(1 - b * n, -b), (1 + b * n, b)]
    log_scale = n * math.log(p.lam) - (b * n / a) * math.log(p.mu) - math.lgamma(n + 1) - math.lgamma(r)
    return gen_wright_sum(upper, lower, -p.lam / p.mu ** (b / a), ctrl, log_scale=log_scale).value


@dataclass(frozen=True)
class WindowSeries:
    """Moment-window series value with its truncation record.

    ``first_discarded`` is the first ``k`` whose moment order reaches
    ``alpha``; ``discard_bound`` bounds ``|series - exact|`` (``E|R(M)|`` for
    the Taylor remainder R), or is ``None`` when not requested.
    """

    value: float
    n_terms: int
    first_discarded: int
    discard_bound: float | None = None


def _window(n, beta, alpha):
    if alpha == 1.0:
        return None
    k = 0
    while beta * (n + k) < alpha - _WINDOW_EPS:
        k += 1
    return k


def _fpp_taylor_coeffs(n, K, p):
    b, lam = p.beta, p.lam
    k = np.arange(K)
    lc = (n * math.log(lam) - math.lgamma(n + 1) + special.gammaln(n + k + 1.0) - special.gammaln(k + 1.0)
          + k * math.log(lam) - special.gammaln(b * (k + n) + 1.0))
    return np.where(k % 2 == 1, -1.0, 1.0) * np.exp(lc), b * (n + k)


def gfnbp_pmf_series(n: int, t: float, p: GfnbpParams, with_bound: bool = False) -> WindowSeries:
    """Moment expansion of the pmf keeping only terms with finite moments.

    Raises SeriesWindowEmpty when ``beta n >= alpha``.  At ``alpha = 1`` every
    moment is finite and the full series is summed (see
    :func:`fnbp_pmf_series`).
    """
    _check_nt(n, t)
    if t == 0:
        return WindowSeries(1.0 if n == 0 else 0.0, 0, 0, 0.0)
    K = _window(n, p.beta, p.alpha)
    if K is None:
        return WindowSeries(fnbp_pmf_series(n, t, p), -1, -1, None)
    if K == 0:
        raise SeriesWindowEmpty(
            f"beta*n = {p.beta * n:g} >= alpha = {p.alpha:g}: no finite-moment term",
            operation="gfnbp_pmf_series",
        )
    c, orders = _fpp_taylor_coeffs(n, K, p)
    moments = np.array([ml_levy_moment(o, t, p) for o in orders])
    value = math.fsum(c * moments)
    bound = _remainder_bound(n, t, p, c, orders) if with_bound else None
    return WindowSeries(value, K, K, bound)


def _remainder_bound(n, t, p, c, orders, h=0.02):
    # E|fpp(n|M) - sum_k c_k M^{o_k}| by quadrature over ln M
    clock = p.replace(beta=1.0)
    dens = mixture.clock_log_density(t, clock, h, lam=1.0)
    y = np.exp(dens.grid)
    w = mixture.inverse_stable_log_density(p.beta, h)
    mean = p.lam * np.exp(p.beta * np.log(y)[:, None] + w.grid[None, :])
    logp = n * np.log(mean) - mean - math.lgamma(n + 1)
    exact = h * (np.exp(logp) @ w.f)
    poly = (c[None, :] * y[:, None] ** orders[None, :]).sum(axis=1)
    return float(h * math.fsum(np.abs(exact - poly) * dens.f) + dens.atom0 * 1e-13)


def gfnbp_pmf(n: int, t: float, p: GfnbpParams, method: str = "quadrature") -> float:
    """``P(N_beta(M(t)) = n)``.

    Parameters
    ----------
    method : {"quadrature", "series", "exact-reduction"}
        ``quadrature`` is authoritative.  ``series`` is the moment expansion
        restricted to finite moments.  ``exact-reduction`` needs
        ``alpha = 1`` and returns the negative binomial pmf when also
        ``beta = 1``, otherwise the gamma-clock power series.
    """
    _check_nt(n, t)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    if method == "quadrature":
        vals, _ = mixture.mixture_pmf(int(n), t, p)
        return float(vals[n])
    if method == "series":
        return gfnbp_pmf_series(n, t, p).value
    if method == "exact-reduction":
        if p.alpha != 1.0:
            raise DomainError("exact-reduction needs alpha = 1")
        if p.beta == 1.0:
            return nb_pmf(n, t, p)
        return fnbp_pmf_series(n, t, p)
    raise DomainError(f"unknown method {method!r}")


def _mean_or_none(t, p):
    try:
        return p.q * ml_levy_moment(p.beta, t, p)
    except MomentDiverges:
        return None


def _table_from_probs(t, probs, mean, method, meta, err=None):
    probs = np.clip(probs, 0.0, 1.0)
    tail, meta["tail_kind"] = _tail(probs, mean, err)
    return PmfTable(t=t, probs=probs, tail_bound=tail, method=method, meta=meta)


def _tail(probs, mean, err=None):
    """Tail bound and its kind.

    With a finite mean the truncated-mean Markov bound is available.  When the
    values carry a verified quadrature error ``err`` the complement
    ``1 - sum`` inflated by ``(N + 1) err`` is also a bound, and the smaller
    of the two is reported.
    """
    p = np.clip(probs, 0.0, 1.0)
    comp = max(1.0 - math.fsum(p), 0.0)
    if mean is None:
        return comp + (0.0 if err is None else p.size * err), "complement"
    markov = max(mean - math.fsum(np.arange(p.size) * p), 0.0) / p.size
    if err is not None and comp + p.size * err < markov:
        return comp + p.size * err, "complement"
    return markov, "markov"


def _grow(fn, n_max, tail_target, n_cap, mean, err=lambda: None):
    # grow the support until the reported tail bound (not just the missing
    # mass) is below target; the Markov bound decays more slowly
    if n_max is not None:
        return fn(int(n_max))
    N = 32
    while True:
        probs = fn(N)
        if N >= n_cap or _tail(probs, mean, err())[0] <= tail_target:
            break
        N = min(2 * N, n_cap)
    # trim to the shortest prefix that still meets the target
    lo, hi = 0, probs.size - 1
    if _tail(probs, mean, err())[0] > tail_target:
        return probs
    while lo < hi:
        mid = (lo + hi) // 2
        if _tail(probs[: mid + 1], mean, err())[0] <= tail_target:
            hi = mid
        else:
            lo = mid + 1
    return probs[: lo + 1]


def gfnbp_pmf_table(t: float, p: GfnbpParams, n_max: int | None = None, method: str = "quadrature",
                    tail_target: float = 1e-4, n_cap: int = 4096, tail: str = "auto") -> PmfTable:
    """Tabulate the pmf on ``0..N`` with a bound on the mass beyond ``N``.

    Without ``n_max`` the support grows until the tail bound drops to
    ``tail_target`` or ``N = n_cap``.  The tail bound is the smaller of the
    truncated-mean Markov bound (finite mean only) and the complement
    ``1 - sum`` inflated by the quadrature refinement error;
    ``meta["tail_kind"]`` records which.  ``tail="markov"`` forces the
    Markov bound, which is independent of the tabulated values' sum.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return PmfTable(t=0.0, probs=np.array([1.0]), tail_bound=0.0, method=method,
                        meta={"tail_kind": "exact"})
    meta = {}
    if method == "quadrature":
        def fn(N):
            vals, err = mixture.mixture_pmf(N, t, p)
            meta["refinement_error"] = err
            return vals
    elif method == "exact-reduction":
        def fn(N):
            return np.array([gfnbp_pmf(k, t, p, method) for k in range(N + 1)])
    elif method == "series":
        K = _window(0, p.beta, p.alpha)
        top = n_cap if K is None else max(int(math.ceil(p.alpha / p.beta - _WINDOW_EPS)) - 1, 0)
        if n_max is not None and n_max > top:
            raise SeriesWindowEmpty(f"series window ends at n = {top}", operation="gfnbp_pmf_table")

        def fn(N):
            return np.array([gfnbp_pmf_series(k, t, p).value for k in range(min(N, top) + 1)])
    else:
        raise DomainError(f"unknown method {method!r}")
    if tail not in ("auto", "markov"):
        raise DomainError(f"unknown tail {tail!r}")
    mean = _mean_or_none(t, p)
    if tail == "markov" and mean is None:
        raise MomentDiverges("the Markov tail bound needs beta < alpha", operation="gfnbp_pmf_table")

    def err():
        return meta.get("refinement_error") if tail == "auto" else None
    probs = _grow(fn, n_max, tail_target, n_cap, mean, err)
    return _table_from_probs(t, probs, mean, method, meta, err())


# -- Sibuya compounding ------------------------------------------------------

def sibuya_pmf(n_max: int, a: float) -> np.ndarray:
    """Sibuya(a) pmf on ``0..n_max``; its pgf is ``1 - (1 - z)^a``."""
    out = np.zeros(n_max + 1)
    if n_max < 1:
        return out
    if a == 1.0:
        out[1] = 1.0
        return out
    j = np.arange(1, n_max + 1, dtype=float)
    out[1:] = np.exp(math.log(a) + special.gammaln(j - a) - math.lgamma(1 - a) - special.gammaln(j + 1))
    return out


@lru_cache(maxsize=32)
def _sibuya_powers(a, n_max):
    s = sibuya_pmf(n_max, a)
    D = np.zeros((n_max + 1, n_max + 1))
    D[0, 0] = 1.0
    for m in range(1, n_max + 1):
        D[m] = np.convolve(D[m - 1], s)[: n_max + 1]
    D.setflags(write=False)
    return D


def sibuya_powers(a: float, n_max: int) -> np.ndarray:
    """``D[m, n] = P(X_1 + ... + X_m = n)`` for Sibuya(a) summands."""
    return _sibuya_powers(float(a), int(n_max))


def compound_sibuya(count_probs, a: float, count_tail: float = 0.0):
    """pmf on ``0..N`` of a Sibuya(a) sum with ``K`` terms, ``P(K = m)`` given.

    Returns ``(probs, tail_bound)``; since each summand is at least one, only
    ``m <= N`` contributes to ``n <= N``.
    """
    count_probs = np.asarray(count_probs, dtype=float)
    N = count_probs.size - 1
    D = sibuya_powers(a, N)
    probs = count_probs @ D
    tail = float(count_probs @ np.maximum(1.0 - D.sum(axis=1), 0.0)) + count_tail
    return probs, tail


def _sfpp_count(N, t, sp):
    x = sp.base.lam ** sp.alpha_prime * t
    probs = stats.poisson.pmf(np.arange(N + 1), x)
    return probs, float(stats.poisson.sf(N, x))


def sfpp_pmf(n: int, t: float, sp: SpaceTimeParams, method: str = "compound",
             ctrl: SeriesControl | None = None) -> float:
    """Space-fractional Poisson pmf.

    ``compound`` uses the exact representation as a Poisson(lam^a' t) sum of
    Sibuya(a') jumps; ``series`` sums the alternating power series, which is
    only usable for moderate ``lam^a' t`` and ``n``.
    """
    _check_nt(n, t)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    a = sp.alpha_prime
    x = sp.base.lam ** a * t
    if a == 1.0:
        return poisson_pmf(n, x)
    if method == "compound":
        counts, _ = _sfpp_count(n, t, sp)
        return float(counts @ sibuya_powers(a, n)[:, n])
    if method == "series":
        sign = -1.0 if n % 2 else 1.0
        res = _wright_series([(1.0, a)], [(1.0 - n, a)], -x, ctrl,
                             log_scale=-math.lgamma(n + 1), name="sfpp_pmf")
        return sign * res.value
    raise DomainError(f"unknown method {method!r}")


def sfpp_pmf_table(t: float, sp: SpaceTimeParams, n_max: int) -> PmfTable:
    if t == 0:
        return PmfTable(0.0, np.array([1.0]), 0.0, "exact-reduction")
    counts, ctail = _sfpp_count(n_max, t, sp)
    probs, tail = compound_sibuya(counts, sp.alpha_prime, ctail)
    return PmfTable(t, probs, tail, "exact-reduction", {"tail_kind": "bound"})


def _nh_count_params(sp: SpaceTimeParams) -> GfnbpParams:
    # N(E_b'(c M)) with unit rate is N_b'(M) with intensity c^b'
    return sp.base.replace(beta=sp.beta_prime, lam=sp.rate ** sp.beta_prime)


def _compound_table(count_params, t, a, n_max, method):
    counts, _ = mixture.mixture_pmf(n_max, t, count_params)
    counts = np.clip(counts, 0.0, 1.0)
    mean = _mean_or_none(t, count_params)
    n = np.arange(n_max + 1)
    if mean is not None:
        ctail = max(mean - math.fsum(n * counts), 0.0) / (n_max + 1)
    else:
        ctail = max(1.0 - math.fsum(counts), 0.0)
    probs, tail = compound_sibuya(counts, a, ctail)
    kind = "bound" if mean is not None else "complement-of-count"
    return PmfTable(t, probs, tail, method, {"tail_kind": kind})


def nh_stfnbp_pmf(n: int, t: float, sp: SpaceTimeParams, method: str = "compound") -> float:
    """pmf of ``N(S_a'(E_b'(c M(t))), 1)``.

    ``compound`` (default) writes the process as a Sibuya(a') sum over a
    GFNBP count with order ``b'`` and intensity ``c^b'``, both evaluated by
    quadrature.  ``series`` is the moment-window series; see
    :func:`nh_stfnbp_pmf_series`.
    """
    _check_nt(n, t)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    if method == "series":
        return nh_stfnbp_pmf_series(n, t, sp).value
    if method != "compound":
        raise DomainError(f"unknown method {method!r}")
    counts, _ = mixture.mixture_pmf(n, t, _nh_count_params(sp))
    return float(np.clip(counts, 0, 1) @ sibuya_powers(sp.alpha_prime, n)[:, n])


def nh_stfnbp_pmf_table(t: float, sp: SpaceTimeParams, n_max: int) -> PmfTable:
    if t == 0:
        return PmfTable(0.0, np.array([1.0]), 0.0, "quadrature")
    return _compound_table(_nh_count_params(sp), t, sp.alpha_prime, n_max, "quadrature")


def nh_stfnbp_pmf_series(n: int, t: float, sp: SpaceTimeParams) -> WindowSeries:
    """Moment-window series for the non-homogeneous space-time variant.

    Terms with ``b' k >= alpha`` have infinite moments and are dropped; the
    first dropped index is reported.  Raises SeriesWindowEmpty when only the
    ``k = 0`` term survives (``b' >= alpha``).
    """
    _check_nt(n, t)
    a1, b1, c = sp.alpha_prime, sp.beta_prime, sp.rate
    base = sp.base
    if t == 0:
        return WindowSeries(1.0 if n == 0 else 0.0, 0, 0, 0.0)
    if base.alpha == 1.0:
        # gamma clock: all moments exist and the terms grow like (c^b'/mu^b')^k
        if sp.rate ** b1 >= base.mu ** b1 * (1 - 1e-12) and b1 == 1.0 and a1 == 1.0:
            raise DivergentSeries("nh series diverges for c >= mu", operation="nh_stfnbp_pmf_series")
        K = None
    else:
        K = 0
        while b1 * K < base.alpha - _WINDOW_EPS:
            K += 1
        if K <= 1:
            raise SeriesWindowEmpty(
                f"beta' = {b1:g} >= alpha = {base.alpha:g}: window holds only k = 0",
                operation="nh_stfnbp_pmf_series",
            )
    terms = []
    k = 0
    while K is None or k < K:
        arg = k * a1 + 1 - n
        if arg <= 0 and abs(arg - round(arg)) < 1e-12:
            term = 0.0
        else:
            lg = (math.lgamma(k * a1 + 1) - math.lgamma(arg) - math.lgamma(k * b1 + 1)
                  + b1 * k * math.log(c) - math.lgamma(n + 1))
            if k:
                lg += ml_levy_log_moment(b1 * k, t, base)
            if lg > 700:
                raise Overflow("nh series terms overflow", operation="nh_stfnbp_pmf_series")
            sgn = special.gammasgn(arg) * (-1.0) ** (k + n)
            term = sgn * math.exp(lg)
        terms.append(term)
        k += 1
        # terms with k a' + 1 <= n can vanish at gamma poles; only stop past them
        if K is None and k > 5 and arg > 1 and max(abs(x) for x in terms[-4:]) < 1e-14:
            break
        if K is None and k > 2000:
            raise NonConvergent("nh_stfnbp series did not settle", operation="nh_stfnbp_pmf_series")
    return WindowSeries(math.fsum(terms), len(terms), -1 if K is None else K)


def _sfgnbp_count_params(sp: SpaceTimeParams) -> GfnbpParams:
    # N_a'(M) is a Poisson(lam^a' M) number of Sibuya(a') jumps
    return sp.base.replace(beta=1.0, lam=sp.base.lam ** sp.alpha_prime)


def sfgnbp_pmf(n: int, t: float, sp: SpaceTimeParams) -> float:
    """pmf of ``N_a'(M(t), lam)``, the space-fractional variant."""
    _check_nt(n, t)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    counts, _ = mixture.mixture_pmf(n, t, _sfgnbp_count_params(sp))
    return float(np.clip(counts, 0, 1) @ sibuya_powers(sp.alpha_prime, n)[:, n])


def sfgnbp_pmf_table(t: float, sp: SpaceTimeParams, n_max: int) -> PmfTable:
    if t == 0:
        return PmfTable(0.0, np.array([1.0]), 0.0, "quadrature")
    return _compound_table(_sfgnbp_count_params(sp), t, sp.alpha_prime, n_max, "quadrature")
