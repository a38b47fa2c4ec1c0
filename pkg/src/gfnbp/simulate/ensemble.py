"""Seeded ensembles.

Paths are simulated in fixed blocks of ``BLOCK`` paths.  Block ``b`` draws
from the counter-based stream ``Philox(key=(master_seed, b))``, so path ``i``
depends only on ``(spec, grid, master_seed, i)``: not on ``n_paths``, on the
number of workers or on the order in which blocks finish.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..analytic.params import GfnbpParams, SpaceTimeParams
from ..errors import DomainError
from . import processes as pr
from .paths import Ensemble, check_grid

BLOCK = 1024

_KIND = {
    "stable": "subordinator",
    "inverse_stable": "subordinator",
    "gamma": "subordinator",
    "ml_levy": "subordinator",
    "fpp": "counting",
    "gfnbp": "counting",
    "sfpp": "counting",
    "sfgnbp": "counting",
    "nh_stfnbp": "counting",
}


@dataclass(frozen=True)
class ProcessSpec:
    """Which generator to run and with what parameters.

    Field use by process: ``stable`` reads ``alpha``, ``inverse_stable``
    ``beta``, ``gamma`` ``rho, mu``, ``ml_levy`` ``alpha, rho, mu``, ``fpp``
    ``beta, lam``, ``gfnbp`` all five.  ``sfpp``, ``sfgnbp`` and
    ``nh_stfnbp`` take a SpaceTimeParams.  ``options`` holds extra keyword
    arguments such as ``resolution`` or ``method``.
    """

    name: str
    params: GfnbpParams | SpaceTimeParams
    options: tuple = field(default=())

    def __post_init__(self):
        if self.name not in _KIND:
            raise DomainError(f"unknown process {self.name!r}; choose from {sorted(_KIND)}")
        needs_sp = self.name in ("sfpp", "sfgnbp", "nh_stfnbp")
        if needs_sp and not isinstance(self.params, SpaceTimeParams):
            raise DomainError(f"{self.name} needs SpaceTimeParams")
        if not needs_sp and not isinstance(self.params, GfnbpParams):
            raise DomainError(f"{self.name} needs GfnbpParams")
        object.__setattr__(self, "options", tuple(sorted(dict(self.options).items())))

    @property
    def kind(self) -> str:
        return _KIND[self.name]

    @property
    def generator_id(self) -> str:
        opts = ",".join(f"{k}={v}" for k, v in self.options)
        return f"{self.name}({opts})" if opts else self.name


def process_spec(name: str, params, **options) -> ProcessSpec:
    return ProcessSpec(name, params, tuple(options.items()))


def simulate_block(spec: ProcessSpec, grid: np.ndarray, rng, n: int) -> np.ndarray:
    """Run the batch kernel of ``spec`` for ``n`` paths."""
    p, o = spec.params, dict(spec.options)
    name = spec.name
    if name == "stable":
        out = pr._batch_stable(p.alpha, grid, rng, n)
    elif name == "inverse_stable":
        out = pr._batch_inverse_stable(p.beta, grid, rng, n, o.get("resolution"), o.get("accuracy"))
    elif name == "gamma":
        out = pr._batch_gamma(p.rho, p.mu, grid, rng, n)
    elif name == "ml_levy":
        out = pr._batch_ml_levy(p, grid, rng, n)
    elif name == "fpp":
        out = pr._batch_fpp(p.beta, p.lam, grid, rng, n)
    elif name == "gfnbp":
        out = pr._batch_gfnbp(p, grid, rng, n)
    elif name == "sfpp":
        out = pr._batch_sfpp(p.alpha_prime, p.base.lam, grid, rng, n)
    elif name == "sfgnbp":
        out = pr._batch_sfgnbp(p, grid, rng, n)
    else:
        out = pr._batch_nh_stfnbp(p, grid, rng, n, o.get("method", "composition"),
                                  o.get("resolution"), o.get("accuracy"))
    return out


def block_rng(master_seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[master_seed % 2**64, block]))


def _run_block(args):
    spec, grid, master_seed, b = args
    return simulate_block(spec, grid, block_rng(master_seed, b), BLOCK)


def _check_seed(master_seed):
    if master_seed is None or int(master_seed) != master_seed or not 0 <= master_seed < 2**64:
        raise DomainError("master_seed must be an integer in [0, 2^64)")
    return int(master_seed)


def run_ensemble(generator: ProcessSpec, n_paths: int, grid, master_seed: int,
                 workers: int = 1) -> Ensemble:
    """Simulate ``n_paths`` independent paths of ``generator`` on ``grid``.

    ``workers > 1`` fans blocks out to a process pool; the result is
    identical to the serial run.
    """
    if int(n_paths) != n_paths or n_paths < 1:
        raise DomainError("n_paths must be a positive integer")
    seed = _check_seed(master_seed)
    g = check_grid(grid)
    n_blocks = -(-int(n_paths) // BLOCK)
    jobs = [(generator, g, seed, b) for b in range(n_blocks)]
    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            blocks = list(ex.map(_run_block, jobs))
    else:
        blocks = [_run_block(j) for j in jobs]
    values = np.concatenate(blocks)[: int(n_paths)]
    if generator.kind == "counting":
        values = values.astype(np.int64)
    return Ensemble(grid=g, values=values, kind=generator.kind, params=generator.params,
                    generator_id=generator.generator_id, master_seed=seed)


def ensemble_path(generator: ProcessSpec, grid, master_seed: int, i: int):
    """Regenerate path ``i`` of any ensemble with this spec, grid and seed."""
    g = check_grid(grid)
    b, r = divmod(int(i), BLOCK)
    vals = _run_block((generator, g, _check_seed(master_seed), b))[r]
    if generator.kind == "counting":
        vals = vals.astype(np.int64)
    return pr.SamplePath(g, vals, generator.kind)
