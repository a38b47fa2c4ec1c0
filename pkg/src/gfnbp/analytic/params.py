"""Parameter containers and the tabulated-pmf record."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError


def _in_unit(x, name):
    if not (0.0 < x <= 1.0):
        raise DomainError(f"{name} must lie in (0, 1], got {x!r}")


def _positive(x, name):
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"{name} must be a finite positive number, got {x!r}")


@dataclass(frozen=True)
class GfnbpParams:
    """Parameters ``(alpha, beta, rho, mu, lam)`` of N_beta(M(t)).

    ``alpha`` is the stable index of the Mittag-Leffler Levy clock,
    ``rho`` and ``mu`` its gamma shape rate and scale, ``beta`` the fractional
    order of the counting process and ``lam`` its intensity.
    """

    alpha: float
    beta: float
    rho: float = 1.0
    mu: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "rho", "mu", "lam"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _in_unit(self.alpha, "alpha")
        _in_unit(self.beta, "beta")
        _positive(self.rho, "rho")
        _positive(self.mu, "mu")
        _positive(self.lam, "lam")

    @property
    def q(self) -> float:
        return self.lam / math.gamma(1.0 + self.beta)

    @property
    def d(self) -> float:
        b = self.beta
        return b * self.q**2 * math.exp(math.lgamma(b) + math.lgamma(1 + b) - math.lgamma(1 + 2 * b))

    def replace(self, **kw) -> "GfnbpParams":
        vals = dict(alpha=self.alpha, beta=self.beta, rho=self.rho, mu=self.mu, lam=self.lam)
        vals.update(kw)
        return GfnbpParams(**vals)

    def as_dict(self) -> dict:
        return dict(alpha=self.alpha, beta=self.beta, rho=self.rho, mu=self.mu, lam=self.lam)


@dataclass(frozen=True)
class SpaceTimeParams:
    """Space/time fractional extension: orders ``alpha_prime``, ``beta_prime``
    and a linear rate function ``R(t) = rate * t``."""

    base: GfnbpParams
    alpha_prime: float = 1.0
    beta_prime: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha_prime", float(self.alpha_prime))
        object.__setattr__(self, "beta_prime", float(self.beta_prime))
        object.__setattr__(self, "rate", float(self.rate))
        _in_unit(self.alpha_prime, "alpha_prime")
        _in_unit(self.beta_prime, "beta_prime")
        _positive(self.rate, "rate")

    def as_dict(self) -> dict:
        d = self.base.as_dict()
        d.update(alpha_prime=self.alpha_prime, beta_prime=self.beta_prime, rate=self.rate)
        return d


METHODS = ("quadrature", "series", "exact-reduction", "empirical")


@dataclass(frozen=True)
class PmfTable:
    """Probabilities on ``n = 0..N_max`` plus a bound on the mass beyond."""

    t: float
    probs: np.ndarray
    tail_bound: float
    method: str = "quadrature"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise DomainError("probs must be a non-empty 1-d array")
        if self.method not in METHODS:
            raise DomainError(f"unknown pmf method {self.method!r}")
        if not self.tail_bound >= 0:
            raise DomainError("tail_bound must be >= 0")

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def total(self) -> float:
        return math.fsum(self.probs) + self.tail_bound

    def padded(self, n_max: int) -> np.ndarray:
        out = np.zeros(n_max + 1)
        m = min(n_max, self.n_max) + 1
        out[:m] = self.probs[:m]
        return out

    def as_dict(self) -> dict:
        return {n: float(p) for n, p in enumerate(self.probs)}
