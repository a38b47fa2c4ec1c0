"""Simulation and analytic evaluation of the fractional Poisson process run
on a Mittag-Leffler Levy clock, with a Monte Carlo verification harness."""

__version__ = "0.1.0"

from . import analytic, errors, simulate, specfun, stats  # noqa: E402
from .analytic import GfnbpParams, PmfTable, SpaceTimeParams  # noqa: E402

__all__ = ["analytic", "errors", "simulate", "specfun", "stats",
           "GfnbpParams", "PmfTable", "SpaceTimeParams", "__version__"]
