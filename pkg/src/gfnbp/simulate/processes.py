"""Path generators.

Every generator has a batch kernel ``_batch_<name>(params, grid, rng, n)``
that returns an ``(n, len(grid))`` array, so ensembles are simulated a block
of paths at a time.  The single-path functions run the kernel with ``n = 1``.
"""

from __future__ import annotations

import math

import numpy as np

from ..analytic.params import GfnbpParams, SpaceTimeParams
from ..errors import DomainError, Overflow, ResolutionTooCoarse
from .paths import EventTimes, SamplePath, check_grid

# first-passage accuracy relative to the scale E_beta(t_max) ~ t_max^beta
DEFAULT_REL_ACCURACY = 1e-3
_POISSON_EXACT_MAX = 1e12
_BROADCAST_CELLS = 4_000_000


def make_rng(seed) -> np.random.Generator:
    """Philox generator keyed by ``(seed, 0)``; Generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or int(seed) != seed or seed < 0:
        raise DomainError("seed must be a nonnegative integer")
    return np.random.Generator(np.random.Philox(key=[int(seed) % 2**64, 0]))


# -- elementary draws --------------------------------------------------------

def stable_unit(rng: np.random.Generator, a: float, size) -> np.ndarray:
    """Unit-time stable draws with Laplace transform ``exp(-s^a)``.

    ``sin(aU) sin((1-a)U)^((1-a)/a) / (sin(U)^(1/a) V^((1-a)/a))`` with
    U uniform on (0, pi] and V standard exponential, evaluated in logs.
    """
    u = np.pi * (1.0 - rng.random(size))
    v = rng.standard_exponential(size)
    r = (1.0 - a) / a
    with np.errstate(divide="ignore", over="ignore"):
        logs = (np.log(np.sin(a * u)) + r * np.log(np.sin((1.0 - a) * u))
                - np.log(np.sin(u)) / a - r * np.log(v))
        return np.exp(logs)


def ml_waiting_times(rng: np.random.Generator, beta: float, lam: float, size) -> np.ndarray:
    """Mittag-Leffler inter-arrival times of the fractional Poisson process.

    ``|ln U1|^(1/b) / lam^(1/b) * sin(b pi U2) sin((1-b) pi U2)^(1/b - 1)
    / (sin(pi U2)^(1/b) |ln U3|^(1/b - 1))``; exponential at ``b = 1``.
    """
    e1 = rng.standard_exponential(size)
    if beta == 1.0:
        return e1 / lam
    return (e1 / lam) ** (1.0 / beta) * stable_unit(rng, beta, size)


def sibuya(rng: np.random.Generator, a: float, size) -> np.ndarray:
    """Sibuya(a) draws as a Beta(a, 1 - a) mixture of geometric laws on 1, 2, ..."""
    if a == 1.0:
        return np.ones(size, dtype=np.int64)
    p = rng.beta(a, 1.0 - a, size)
    return rng.geometric(np.maximum(p, 1e-300)).astype(np.int64)


def poisson(rng: np.random.Generator, mean: np.ndarray) -> np.ndarray:
    """Poisson draws; means above 1e12 use the rounded normal approximation."""
    mean = np.asarray(mean, dtype=float)
    if not np.all(np.isfinite(mean)):
        raise Overflow("Poisson mean is not finite (clock overflow)", operation="simulate")
    big = mean > _POISSON_EXACT_MAX
    out = rng.poisson(np.where(big, 0.0, mean)).astype(np.int64)
    if np.any(big):
        m = mean[big]
        out[big] = np.rint(m + np.sqrt(m) * rng.standard_normal(m.size)).astype(np.int64)
    return out


def _dt(grid):
    return np.diff(grid)


def _cumulate(inc):
    n = inc.shape[0]
    return np.concatenate([np.zeros((n, 1), dtype=inc.dtype), np.cumsum(inc, axis=1)], axis=1)


# -- subordinators -----------------------------------------------------------

def _check_alpha_open(a, name="alpha"):
    if not 0.0 < a < 1.0:
        raise DomainError(f"{name} must lie in (0, 1)")


def _batch_stable(alpha, grid, rng, n):
    _check_alpha_open(alpha)
    dt = _dt(grid)
    inc = dt ** (1.0 / alpha) * stable_unit(rng, alpha, (n, dt.size))
    return _cumulate(inc)


def _batch_gamma(rho, mu, grid, rng, n):
    if not (rho > 0 and mu > 0):
        raise DomainError("rho and mu must be positive")
    dt = _dt(grid)
    return _cumulate(rng.gamma(rho * dt, 1.0 / mu, size=(n, dt.size)))


def _ml_increments(p: GfnbpParams, dt, rng, n):
    q = rng.gamma(p.rho * dt, 1.0 / p.mu, size=(n, dt.size))
    if p.alpha == 1.0:
        return q
    # self-similarity: S_alpha(Q) = Q^(1/alpha) S_alpha(1)
    return q ** (1.0 / p.alpha) * stable_unit(rng, p.alpha, q.shape)


def _batch_ml_levy(p: GfnbpParams, grid, rng, n):
    return _cumulate(_ml_increments(p, _dt(grid), rng, n))


def first_passage(rng, y: np.ndarray, beta: float, delta: np.ndarray) -> np.ndarray:
    """Inverse stable subordinator evaluated at per-row query times.

    ``y`` is ``(n, m)`` with nondecreasing rows; row ``i`` uses a latent
    stable path on the operational grid ``k * delta[i]``.  With ``k`` the
    first index where the latent path exceeds ``y``, the estimate is
    ``(k - 1/2) delta``, within ``delta / 2`` of the exact first passage.
    """
    y = np.asarray(y, dtype=float)
    n, m = y.shape
    delta = np.broadcast_to(np.asarray(delta, dtype=float), (n,)).copy()
    out = np.zeros((n, m))
    pending = y > 0
    steps = np.zeros(n)
    level = np.zeros(n)
    active = np.nonzero(pending.any(axis=1))[0]
    scale = delta ** (1.0 / beta)
    # first batch sized to the mean passage time of the row's last query
    need = np.ceil(y[:, -1] ** beta / math.gamma(1.0 + beta) / delta)
    k = int(np.clip(np.median(need[active]), 8, 1 << 16)) if active.size else 0
    while active.size:
        inc = scale[active, None] * stable_unit(rng, beta, (active.size, k))
        s = level[active, None] + np.cumsum(inc, axis=1)
        ya = y[active]
        pa = pending[active]
        newly = pa & (ya < s[:, -1:])
        if np.any(newly):
            est = delta[active, None] * (steps[active, None] + _count_le(s, ya) + 0.5)
            rows, cols = np.nonzero(newly)
            out[active[rows], cols] = est[rows, cols]
            pending[active[rows], cols] = False
        steps[active] += k
        level[active] = s[:, -1]
        active = active[pending[active].any(axis=1)]
        k = max(8, k // 4)
    return out


def _resolve_delta(y_max, beta, resolution, accuracy):
    y_max = np.asarray(y_max, dtype=float)
    acc = (DEFAULT_REL_ACCURACY * np.maximum(y_max, 1e-300) ** beta
           if accuracy is None else np.full(y_max.shape, float(accuracy)))
    if resolution is None:
        return 2.0 * acc
    if not resolution > 0:
        raise DomainError("resolution must be positive")
    if np.any(resolution / 2.0 > acc):
        raise ResolutionTooCoarse(
            f"latent step {resolution:g} allows first-passage error {resolution / 2:g}, "
            f"above the requested accuracy {float(np.min(acc)):g}",
            operation="sim_inverse_stable",
        )
    return np.full(y_max.shape, float(resolution))


def _batch_inverse_stable(beta, grid, rng, n, resolution=None, accuracy=None):
    _check_alpha_open(beta, "beta")
    y = np.broadcast_to(grid, (n, grid.size))
    delta = _resolve_delta(np.full(n, grid[-1]), beta, resolution, accuracy)
    return first_passage(rng, y, beta, delta)


# -- counting processes ------------------------------------------------------

def _count_le(arr, y):
    """``out[i, j] = #{k : arr[i, k] <= y[i, j]}`` for row-sorted ``arr``."""
    if arr.shape[0] * arr.shape[1] * y.shape[1] <= _BROADCAST_CELLS:
        return (arr[:, :, None] <= y[:, None, :]).sum(axis=1)
    return np.stack([np.searchsorted(a, b, side="right") for a, b in zip(arr, y)])


def renewal_counts(rng, y: np.ndarray, beta: float, lam: float) -> np.ndarray:
    """Counts of one fractional Poisson stream per row at query times ``y``.

    Each row gets a single stream of Mittag-Leffler waiting times extended
    in doubling batches until it passes the row's last query time, so the
    counts along a row are those of one path.
    """
    y = np.asarray(y, dtype=float)
    n, m = y.shape
    counts = np.zeros((n, m), dtype=np.int64)
    last = np.zeros(n)
    horizon = y[:, -1]
    active = np.nonzero(horizon > 0)[0]
    k = 8
    while active.size:
        w = ml_waiting_times(rng, beta, lam, (active.size, k))
        arr = last[active, None] + np.cumsum(w, axis=1)
        counts[active] += _count_le(arr, y[active])
        last[active] = arr[:, -1]
        active = active[arr[:, -1] <= horizon[active]]
        k = min(2 * k, 4096)
    return counts


def _batch_fpp(beta, lam, grid, rng, n):
    if not (0.0 < beta <= 1.0 and lam > 0):
        raise DomainError("need 0 < beta <= 1 and lambda > 0")
    return renewal_counts(rng, np.broadcast_to(grid, (n, grid.size)), beta, lam)


def _batch_gfnbp(p: GfnbpParams, grid, rng, n):
    m = _batch_ml_levy(p, grid, rng, n)
    return renewal_counts(rng, m, p.beta, p.lam)


def _poisson_over_clock(rng, clock, lam):
    inc = poisson(rng, lam * np.diff(clock, axis=1))
    return _cumulate(inc)


def _stable_over(rng, clock, a):
    """``S_a`` evaluated along nondecreasing rows of ``clock``."""
    if a == 1.0:
        return clock
    d = np.diff(clock, axis=1)
    with np.errstate(over="ignore"):
        inc = d ** (1.0 / a) * stable_unit(rng, a, d.shape)
    return _cumulate(inc)


def _batch_sfpp(alpha_prime, lam, grid, rng, n):
    if not (0.0 < alpha_prime <= 1.0 and lam > 0):
        raise DomainError("need 0 < alpha' <= 1 and lambda > 0")
    clock = _stable_over(rng, np.broadcast_to(grid, (n, grid.size)), alpha_prime)
    return _poisson_over_clock(rng, clock, lam)


def _batch_sfgnbp(sp: SpaceTimeParams, grid, rng, n):
    m = _batch_ml_levy(sp.base, grid, rng, n)
    return _poisson_over_clock(rng, _stable_over(rng, m, sp.alpha_prime), sp.base.lam)


def _batch_nh_stfnbp(sp: SpaceTimeParams, grid, rng, n, method="composition",
                     resolution=None, accuracy=None):
    p, a1, b1, c = sp.base, sp.alpha_prime, sp.beta_prime, sp.rate
    if method == "renewal":
        # N(S_a'(E_b'(c y))) is a Sibuya(a') sum over N_b'(y) with intensity c^b'
        counts = _batch_gfnbp(p.replace(beta=b1, lam=c**b1), grid, rng, n)
        return _sibuya_sums(rng, counts, a1)
    if method != "composition":
        raise DomainError(f"unknown method {method!r}")
    y = c * _batch_ml_levy(p, grid, rng, n)
    if b1 == 1.0:
        e = y
    else:
        delta = _resolve_delta(y[:, -1], b1, resolution, accuracy)
        e = first_passage(rng, y, b1, delta)
    return _poisson_over_clock(rng, _stable_over(rng, e, a1), 1.0)


def _sibuya_sums(rng, counts, a):
    if a == 1.0:
        return counts
    total = counts[:, -1]
    draws = sibuya(rng, a, int(total.sum()))
    cs = np.concatenate([[0], np.cumsum(draws)])
    start = np.concatenate([[0], np.cumsum(total)[:-1]])
    return cs[start[:, None] + counts] - cs[start][:, None]


# -- single-path API ---------------------------------------------------------

def _single(values, grid, kind):
    return SamplePath(grid, values[0], kind)


def sim_stable(alpha: float, grid, seed) -> SamplePath:
    """Stable subordinator path with ``E exp(-u S(t)) = exp(-t u^alpha)``."""
    g = check_grid(grid)
    return _single(_batch_stable(alpha, g, make_rng(seed), 1), g, "subordinator")


def sim_inverse_stable(beta: float, grid, seed, resolution: float | None = None,
                       accuracy: float | None = None) -> SamplePath:
    """Inverse stable subordinator by first passage of a latent stable path.

    Parameters
    ----------
    resolution : float, optional
        Step of the latent operational grid.  Defaults to twice the accuracy.
    accuracy : float, optional
        Largest tolerated absolute error of each value; defaults to
        ``1e-3 * t_max**beta``.  ResolutionTooCoarse is raised when
        ``resolution / 2`` exceeds it.
    """
    g = check_grid(grid)
    vals = _batch_inverse_stable(beta, g, make_rng(seed), 1, resolution, accuracy)
    return _single(vals, g, "subordinator")


def sim_gamma(rho: float, mu: float, grid, seed) -> SamplePath:
    """Gamma subordinator: increments Gamma(shape rho dt, scale 1/mu)."""
    g = check_grid(grid)
    return _single(_batch_gamma(rho, mu, g, make_rng(seed), 1), g, "subordinator")


def sim_ml_levy(p: GfnbpParams, grid, seed) -> SamplePath:
    """Mittag-Leffler Levy subordinator via increments ``Q^(1/alpha) S``."""
    g = check_grid(grid)
    return _single(_batch_ml_levy(p, g, make_rng(seed), 1), g, "subordinator")


def sim_fpp(beta: float, lam: float, T: float, seed) -> EventTimes:
    """Arrival times of the fractional Poisson process on [0, T]."""
    if not (0.0 < beta <= 1.0 and lam > 0 and T > 0):
        raise DomainError("need 0 < beta <= 1, lambda > 0 and T > 0")
    rng = make_rng(seed)
    chunks = []
    last, k = 0.0, 8
    while last <= T:
        arr = last + np.cumsum(ml_waiting_times(rng, beta, lam, k))
        chunks.append(arr)
        last = arr[-1]
        k = min(2 * k, 4096)
    arr = np.concatenate(chunks)
    return EventTimes(arr[arr <= T], float(T))


def sim_gfnbp(p: GfnbpParams, grid, seed) -> SamplePath:
    """``N_beta(M(t))`` from one ML Levy path and one event stream up to ``M(t_max)``."""
    g = check_grid(grid)
    return _single(_batch_gfnbp(p, g, make_rng(seed), 1), g, "counting")


def sim_sfpp(alpha_prime: float, lam: float, grid, seed) -> SamplePath:
    """Poisson process with rate ``lam`` run on a stable clock ``S_a'(t)``."""
    g = check_grid(grid)
    return _single(_batch_sfpp(alpha_prime, lam, g, make_rng(seed), 1), g, "counting")


def sim_sfgnbp(sp: SpaceTimeParams, grid, seed) -> SamplePath:
    """``N(S_a'(M(t)), lam)``: the space-fractional process on the ML Levy clock."""
    g = check_grid(grid)
    return _single(_batch_sfgnbp(sp, g, make_rng(seed), 1), g, "counting")


def sim_nh_stfnbp(sp: SpaceTimeParams, grid, seed, method: str = "composition",
                  resolution: float | None = None, accuracy: float | None = None) -> SamplePath:
    """``N(S_a'(E_b'(c M(t))), 1)`` with rate function ``R(t) = c t``.

    ``method="composition"`` simulates each layer (the inverse stable one by
    first passage); ``"renewal"`` uses the equivalent Sibuya sum over a
    fractional Poisson count with intensity ``c^b'`` and has no
    discretisation error.
    """
    g = check_grid(grid)
    vals = _batch_nh_stfnbp(sp, g, make_rng(seed), 1, method, resolution, accuracy)
    return _single(vals, g, "counting")
