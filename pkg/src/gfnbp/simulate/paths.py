"""Path containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DomainError, GridMiss

KINDS = ("subordinator", "counting")


def check_grid(grid) -> np.ndarray:
    """Validate a time grid: finite, strictly increasing, starting at 0."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise DomainError("grid must not be empty")
    if not np.all(np.isfinite(g)):
        raise DomainError("grid must be finite")
    if g[0] != 0.0:
        raise DomainError("grid must start at 0")
    if np.any(np.diff(g) <= 0):
        raise DomainError("grid must be strictly increasing")
    return g


def grid_index(grid: np.ndarray, t: float) -> int:
    i = int(np.searchsorted(grid, t))
    if i >= grid.size or grid[i] != t:
        raise GridMiss(f"t={t!r} is not on the ensemble grid")
    return i


@dataclass(frozen=True)
class SamplePath:
    grid: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}")
        if len(self.grid) != len(self.values):
            raise DomainError("grid and values differ in length")

    def is_valid(self) -> bool:
        v = np.asarray(self.values)
        if v.size == 0 or v[0] != 0 or np.any(np.diff(v) < 0):
            return False
        if self.kind == "counting":
            return bool(np.all(v >= 0) and np.all(v == np.floor(v)))
        return bool(np.all(np.isfinite(v)))

    def at(self, t: float):
        return self.values[grid_index(np.asarray(self.grid), t)]


@dataclass(frozen=True)
class EventTimes:
    arrivals: np.ndarray
    horizon: float

    def count(self, t: float) -> int:
        """Number of arrivals in [0, t]."""
        return int(np.searchsorted(self.arrivals, t, side="right"))


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Independent paths on a shared grid, stored as one (n_paths, n_times) array.

    Path ``i`` is a pure function of ``(generator_id, params, grid,
    master_seed, i)``.
    """

    grid: np.ndarray
    values: np.ndarray
    kind: str
    params: Any
    generator_id: str
    master_seed: int
    meta: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def paths(self) -> list[SamplePath]:
        return [SamplePath(self.grid, row, self.kind) for row in self.values]

    def path(self, i: int) -> SamplePath:
        return SamplePath(self.grid, self.values[i], self.kind)

    def at(self, t: float) -> np.ndarray:
        """Cross-section of all paths at grid time ``t``."""
        return self.values[:, grid_index(self.grid, t)]

    def __eq__(self, other):
        if not isinstance(other, Ensemble):
            return NotImplemented
        return (self.kind == other.kind and self.generator_id == other.generator_id
                and self.master_seed == other.master_seed and self.params == other.params
                and np.array_equal(self.grid, other.grid)
                and np.array_equal(self.values, other.values))
