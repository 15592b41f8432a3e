"""Location costs and social cost of the pandemic location game."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .epidemic import (
    DomainError,
    GameParams,
    attack_probability,
    attack_probability_derivative,
    final_size_array,
    final_size_derivative,
    final_size_second_derivative,
)

__all__ = [
    "Allocation",
    "LocationCost",
    "isolation_cost",
    "selfish_cost",
    "selfish_cost_derivative",
    "altruistic_cost",
    "altruistic_cost_derivative",
    "empty_location_cost",
    "social_cost",
    "uniform_social_cost",
]

SUM_TOL = 1e-12


@dataclass(frozen=True)
class Allocation:
    """Densities of the used locations, stored in nonincreasing order.

    Every listed entry is a used location.  A zero entry is a location used
    by a measure-zero set of individuals; it holds no mass but still
    counts towards ``support_size``.  Empty locations are not listed.
    """

    densities: tuple

    def __init__(self, densities: Sequence[float]):
        values = tuple(sorted((float(d) for d in densities), reverse=True))
        if not values:
            raise DomainError("an allocation uses at least one location")
        if any(not math.isfinite(d) or d < 0 or d > 1 for d in values):
            raise DomainError("densities must lie in [0, 1]")
        if abs(math.fsum(values) - 1.0) > SUM_TOL:
            raise DomainError(f"densities must sum to 1, got {math.fsum(values)!r}")
        object.__setattr__(self, "densities", values)

    @classmethod
    def uniform(cls, n: int, zero_used: int = 0) -> "Allocation":
        """Mass split evenly over ``n`` locations, plus ``zero_used`` empty-but-used ones."""
        if n < 1:
            raise DomainError("n must be at least 1")
        return cls([1.0 / n] * n + [0.0] * zero_used)

    @property
    def support_size(self) -> int:
        return len(self.densities)

    @property
    def occupied(self) -> np.ndarray:
        """Densities of the locations with positive mass."""
        return np.array([d for d in self.densities if d > 0])

    def as_array(self) -> np.ndarray:
        return np.array(self.densities)


@dataclass(frozen=True)
class LocationCost:
    isolation: float
    infection: float
    total: float


def isolation_cost(x, params: GameParams):
    """``c / x``, with ``+inf`` at ``x = 0``."""
    xa = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(xa > 0, params.c / np.where(xa > 0, xa, 1.0), np.inf)
    return float(out) if out.ndim == 0 else out


def selfish_cost(x: float, params: GameParams) -> LocationCost:
    f = isolation_cost(x, params)
    p = attack_probability(x, params)
    return LocationCost(isolation=f, infection=p, total=f + p)


def selfish_cost_derivative(x, params: GameParams):
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("selfish cost is differentiable only for x > 0")
    out = -params.c / xa**2 + np.asarray(attack_probability_derivative(xa, params))
    return float(out) if out.ndim == 0 else out


def empty_location_cost(params: GameParams, population: str) -> float:
    """Cost of moving to an empty location for the given population type."""
    if population == "selfish":
        return math.inf
    if population == "altruistic":
        return params.c + params.eta
    raise ValueError(f"unknown population type {population!r}")


def altruistic_cost(x: float, used: bool, params: GameParams) -> float:
    """Marginal social cost felt by an altruist.

    A used location costs ``R'(x)``; an empty one costs ``c + R'(0) = c + eta``.
    """
    if not used:
        if x != 0:
            raise DomainError("an unused location has zero density")
        return empty_location_cost(params, "altruistic")
    r = final_size_array(x, params)
    return float(final_size_derivative(x, r, params))


def altruistic_cost_derivative(x, params: GameParams):
    """Gradient of the altruistic cost at a used location, i.e. ``R''(x)``."""
    xa = np.asarray(x, dtype=float)
    r = final_size_array(xa, params)
    r1 = final_size_derivative(xa, r, params)
    return final_size_second_derivative(xa, r, r1, params)


def social_cost(alloc: Allocation, params: GameParams) -> float:
    """``c * |N(x)|`` plus the final sizes summed over used locations."""
    r = final_size_array(alloc.as_array(), params)
    return params.c * alloc.support_size + math.fsum(r.tolist())


def uniform_social_cost(n, params: GameParams):
    """Social cost of the uniform allocation over ``n`` locations (vectorised in ``n``)."""
    n = np.asarray(n, dtype=float)
    return params.c * n + n * final_size_array(1.0 / n, params)
