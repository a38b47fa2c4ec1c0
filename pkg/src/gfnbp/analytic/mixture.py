"""Poisson-mixture quadrature shared by every counting-process pmf.

Conditionally on its clocks, each counting process here is Poisson with
random mean ``lam * Z``.  For N_beta(M(t)) the clock is

    ln Z = (beta/alpha) ln G + beta ln S_alpha + ln W,

with G ~ Gamma(rho t, 1/mu), S_alpha a unit-time stable variable and
W = E_beta(1) = S_beta^(-beta), all independent.  Each term has a density
that is a positive integral (closed form for G, Kanter's representation for
the stable parts), so the density of ln Z is a positive convolution and the
pmf a positive trapezoid sum.  Nothing cancels and the result is accurate in
the absolute sense for every ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import signal, special

from ..errors import QuadratureFail
from .params import GfnbpParams

# Z below 1e-13 / lam is counted as an atom at n = 0
_ATOM_EPS = 1e-13
_TAIL_EPS = 1e-14
# Kanter nodes beyond pi - exp(-_R_MAX) carry less than 1e-16 mass
_R_MAX = 37.0

_GX, _GW = np.polynomial.legendre.leggauss(64)
_PX, _PW = np.polynomial.legendre.leggauss(6)


@dataclass(frozen=True)
class LogDensity:
    """Density of ``ln Z`` sampled at ``z0 + k h`` plus an atom near ``Z = 0``."""

    z0: float
    h: float
    f: np.ndarray
    atom0: float = 0.0

    @property
    def grid(self) -> np.ndarray:
        return self.z0 + self.h * np.arange(self.f.size)

    @property
    def mass(self) -> float:
        return self.h * math.fsum(self.f) + self.atom0


# -- Kanter representation ---------------------------------------------------

def _log_kanter_a(phi, g):
    return ((g / (1 - g)) * np.log(np.sin(g * phi)) + np.log(np.sin((1 - g) * phi))
            - np.log(np.sin(phi)) / (1 - g))


@lru_cache(maxsize=32)
def _kanter_nodes(g: float):
    # [0, pi/2]: plain Gauss-Legendre; (pi/2, pi): phi = pi - exp(-r) with
    # panels narrow enough to resolve a unit-width bump in ln a(phi)
    phi1 = np.pi / 4 * (_GX + 1)
    w1 = np.pi / 4 * _GW
    r0 = -math.log(np.pi / 2)
    width = min(0.5, (1 - g) / 2)
    edges = np.arange(r0, _R_MAX + width, width)
    a, b = edges[:-1, None], edges[1:, None]
    r = ((b - a) / 2 * _PX + (a + b) / 2).ravel()
    wr = ((b - a) / 2 * _PW).ravel()
    phi = np.concatenate([phi1, np.pi - np.exp(-r)])
    w = np.concatenate([w1, wr * np.exp(-r)]) / np.pi
    return _log_kanter_a(phi, g), w


def kanter_density(y, g: float) -> np.ndarray:
    """Density of ``Y = ln E - ln a(U)`` for stable index ``g`` in (0, 1).

    With E ~ Exp(1) and U ~ Uniform(0, pi), ``exp(-Y (1-g)/g)`` is a unit
    stable variable with Laplace transform ``exp(-s^g)``.
    """
    y = np.asarray(y, dtype=float)
    om, w = _kanter_nodes(float(g))
    flat = y.ravel()
    res = np.empty(flat.size)
    step = max(1, 2_000_000 // om.size)
    for i in range(0, flat.size, step):
        x = om[None, :] + flat[i:i + step, None]
        with np.errstate(over="ignore"):
            res[i:i + step] = np.exp(x - np.exp(x)) @ w
    return res.reshape(y.shape)


def kanter_y_range(g: float):
    log_amin = (g / (1 - g)) * math.log(g) + math.log(1 - g)
    return -36.0 / (1 - g) - 5.0, math.log(45.0) - log_amin


MAX_LATTICE = 20_000_000


def _aligned(lo, hi, h):
    k0 = math.floor(lo / h)
    k1 = math.ceil(hi / h)
    if k1 - k0 > MAX_LATTICE:
        # happens for orders within ~1e-6 of 1, where the kernel is nearly a point mass
        raise QuadratureFail(
            f"log-density lattice would need {k1 - k0:.3g} points (limit {MAX_LATTICE})",
            operation="mixture_quadrature",
        )
    return k0, np.arange(k0, k1 + 1) * h


def scaled_kanter(g: float, sigma: float, h: float) -> LogDensity:
    """Density of ``sigma * Y_g`` on the lattice ``h Z``."""
    ylo, yhi = kanter_y_range(g)
    lo, hi = sorted((sigma * ylo, sigma * yhi))
    k0, z = _aligned(lo, hi, h)
    f = kanter_density(z / sigma, g) / abs(sigma)
    return LogDensity(k0 * h, h, f)


def stable_log_density(g: float, h: float) -> LogDensity:
    """Density of ``ln S_g(1)``."""
    return scaled_kanter(g, -(1 - g) / g, h)


def inverse_stable_log_density(g: float, h: float) -> LogDensity:
    """Density of ``ln E_g(1)``."""
    return scaled_kanter(g, 1 - g, h)


def convolve(a: LogDensity, b: LogDensity) -> LogDensity:
    f = a.h * signal.fftconvolve(a.f, b.f)
    return LogDensity(a.z0 + b.z0, a.h, np.maximum(f, 0.0), a.atom0 + b.atom0)


# -- the clock ln Z ----------------------------------------------------------

def _gamma_part(t, p: GfnbpParams, scale: float, lo: float, h: float) -> LogDensity:
    """Density of ``scale * ln G`` on the lattice from ``lo`` up, with the
    mass below the first node returned as an atom."""
    rt = p.rho * t
    g_hi = math.log(special.gammainccinv(rt, _TAIL_EPS) / p.mu)
    # natural lower end: gamma mass below it is < _TAIL_EPS
    g_lo_nat = (math.log(_TAIL_EPS) + math.lgamma(rt + 1)) / rt - math.log(p.mu)
    z_lo = max(lo, scale * g_lo_nat)
    z_hi = max(scale * g_hi, z_lo + h)
    k0, z = _aligned(z_lo, z_hi, h)
    g = z / scale
    f = np.exp(rt * (g + math.log(p.mu)) - p.mu * np.exp(g) - math.lgamma(rt)) / scale
    atom = float(special.gammainc(rt, p.mu * math.exp(g[0])))
    # the first node starts the trapezoid, so half its cell is already atom;
    # the h^2/12 f'(z0) Euler-Maclaurin term matters when rt is small and the
    # density is still sizeable at the cut
    df0 = f[0] * (rt - p.mu * math.exp(g[0])) / scale
    return LogDensity(k0 * h, h, f, max(atom - 0.5 * h * f[0] + h * h / 12.0 * df0, 0.0))


def clock_log_density(t: float, p: GfnbpParams, h: float, lam: float | None = None) -> LogDensity:
    """Density of ``ln Z`` for ``Z = M(t)^beta E_beta(1)`` on the lattice ``h Z``.

    Mass where ``lam Z < 1e-13`` (it only feeds ``n = 0``) is folded into the
    atom.
    """
    lam = p.lam if lam is None else lam
    a, b = p.alpha, p.beta
    z_cut = math.log(_ATOM_EPS / lam)
    parts = []
    if a < 1.0:
        parts.append(scaled_kanter(a, -b * (1 - a) / a, h))
    if b < 1.0:
        parts.append(inverse_stable_log_density(b, h))
    if parts:
        rest = parts[0] if len(parts) == 1 else convolve(parts[0], parts[1])
        rest_hi = rest.grid[-1]
    else:
        rest, rest_hi = None, 0.0
    gpart = _gamma_part(t, p, b / a, z_cut - rest_hi, h)
    dens = gpart if rest is None else convolve(gpart, rest)
    below = dens.grid < z_cut
    k = int(np.count_nonzero(below))
    atom = dens.atom0 + dens.h * math.fsum(dens.f[below])
    return LogDensity(dens.z0 + k * dens.h, dens.h, dens.f[k:], atom)


def poisson_mixture(n_max: int, lam: float, dens: LogDensity) -> np.ndarray:
    """``P(N = n) = E[Pois(n; lam Z)]`` for ``n = 0..n_max``."""
    z = dens.grid
    keep = dens.f > 0
    z, f = z[keep], dens.f[keep]
    mean = lam * np.exp(z)
    logm = np.log(mean)
    out = np.empty(n_max + 1)
    for i in range(0, n_max + 1, 128):
        n = np.arange(i, min(i + 128, n_max + 1))[:, None]
        logp = n * logm[None, :] - mean[None, :] - special.gammaln(n + 1.0)
        out[i:i + n.shape[0]] = dens.h * (np.exp(logp) @ f)
    out[0] += dens.atom0
    return out


def poisson_mixture_laplace(v: float, lam: float, dens: LogDensity) -> float:
    """``E exp(-v lam Z)``."""
    z = dens.grid
    return dens.h * math.fsum(np.exp(-v * lam * np.exp(z)) * dens.f) + dens.atom0


def _h0(p: GfnbpParams, t: float) -> float:
    widths = [1.0]
    if p.alpha < 1:
        widths.append(p.beta * (1 - p.alpha) / p.alpha)
    if p.beta < 1:
        widths.append(1 - p.beta)
    widths.append(p.beta / p.alpha / math.sqrt(max(p.rho * t, 1.0)))
    return 0.2 * min(widths)


def _converged(fn, h0: float, tol: float, max_halvings: int = 5):
    h = h0
    prev = fn(h)
    err = math.inf
    for _ in range(max_halvings):
        h /= 2.0
        cur = fn(h)
        err = float(np.max(np.abs(cur - prev)))
        if err <= tol:
            return cur, err
        prev = cur
    raise QuadratureFail(
        f"mixture quadrature did not settle: last refinement changed values by {err:.3g}",
        operation="gfnbp_pmf",
    )


@lru_cache(maxsize=256)
def _pmf_cached(n_max, t, key, lam, tol):
    p = GfnbpParams(*key)
    vals, err = _converged(
        lambda h: poisson_mixture(n_max, lam, clock_log_density(t, p, h, lam)), _h0(p, t), tol
    )
    vals.setflags(write=False)
    return vals, err


def mixture_pmf(n_max: int, t: float, p: GfnbpParams, lam: float | None = None,
                tol: float = 1e-10):
    """Vector ``P(N_beta(M(t)) = n)``, ``n = 0..n_max``, and its refinement error.

    ``lam`` overrides the intensity of the counting process.
    """
    lam = p.lam if lam is None else float(lam)
    if t == 0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out, 0.0
    key = (p.alpha, p.beta, p.rho, p.mu, p.lam)
    vals, err = _pmf_cached(int(n_max), float(t), key, lam, tol)
    return np.array(vals), err


@lru_cache(maxsize=256)
def _laplace_cached(v, t, key, tol):
    p = GfnbpParams(*key)
    vals, _ = _converged(
        lambda h: np.array([poisson_mixture_laplace(v, p.lam, clock_log_density(t, p, h))]),
        _h0(p, t), tol,
    )
    return float(vals[0])


def mixture_laplace(v: float, t: float, p: GfnbpParams, tol: float = 1e-11) -> float:
    """``E exp(-v lam E_beta(M(t)))`` by the same quadrature."""
    if t == 0 or v == 0:
        return 1.0
    return _laplace_cached(float(v), float(t), (p.alpha, p.beta, p.rho, p.mu, p.lam), tol)
