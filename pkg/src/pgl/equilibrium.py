"""Evolutionarily stable states of selfish and altruistic populations.

An allocation is an ESS when (1) every occupied location has the same
cost, no larger than the cost of opening an empty location, and (2) when
more than one location is used, the cost gradient at every occupied
location is strictly positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Literal, Tuple

import numpy as np

from .epidemic import (
    DegenerateError,
    GameParams,
    final_size_array,
    final_size_derivative,
    final_size_second_derivative,
)
from .game import (
    Allocation,
    altruistic_cost_derivative,
    empty_location_cost,
    isolation_cost,
    selfish_cost_derivative,
    uniform_social_cost,
)

__all__ = [
    "Population",
    "EssRecord",
    "EssReport",
    "Violation",
    "check_ess",
    "enumerate_uniform_ess",
    "max_selfish_support",
    "altruistic_stability_interval",
    "altruistic_ess_threshold",
    "COST_RTOL",
    "GRAD_ATOL",
    "DEFAULT_N_MAX",
]

Population = Literal["selfish", "altruistic"]

COST_RTOL = 1e-9
GRAD_ATOL = 1e-10
DEFAULT_N_MAX = 1000

_SCAN_POINTS = 10_000
_SCAN_LOW = 1e-6
_ROOT_XTOL = 1e-10


@dataclass(frozen=True)
class Violation:
    kind: str  # "cost_mismatch" | "profitable_deviation" | "nonpositive_gradient"
    location: int
    value: float
    detail: str


@dataclass(frozen=True)
class EssReport:
    is_nash: bool
    is_stable: bool
    violations: Tuple[Violation, ...] = ()

    @property
    def verdict(self) -> bool:
        return self.is_nash and self.is_stable


@dataclass(frozen=True)
class EssRecord:
    population_type: str
    support_size: int
    density: float
    location_cost: float
    social: float
    stability_margin: float

    def as_dict(self) -> dict:
        return {
            "population_type": self.population_type,
            "support_size": self.support_size,
            "density": self.density,
            "location_cost": self.location_cost,
            "social": self.social,
            "stability_margin": self.stability_margin,
        }


def _costs_and_gradients(x: np.ndarray, params: GameParams, population: str):
    r = final_size_array(x, params)
    r1 = np.asarray(final_size_derivative(x, r, params), dtype=float)
    r2 = np.asarray(final_size_second_derivative(x, r, r1, params), dtype=float)
    if population == "selfish":
        p = r / x
        cost = np.asarray(isolation_cost(x, params)) + p
        grad = -params.c / x**2 + (1.0 - p) * params.r0 * r1
    elif population == "altruistic":
        cost, grad = r1, r2
    else:
        raise ValueError(f"unknown population type {population!r}")
    return cost, grad


def _within(a, b, rtol):
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def check_ess(
    alloc: Allocation,
    population: Population,
    params: GameParams,
    cost_rtol: float = COST_RTOL,
    grad_atol: float = GRAD_ATOL,
) -> EssReport:
    """Check both ESS conditions for an arbitrary finite-support allocation.

    Costs at occupied locations must agree to relative tolerance
    ``cost_rtol`` and must not exceed the empty-location cost by more than
    that tolerance.  Gradients must exceed ``grad_atol``; a gradient of
    exactly zero is not stable.
    """
    x = alloc.occupied
    cost, grad = _costs_and_gradients(x, params, population)
    empty = empty_location_cost(params, population)
    violations: List[Violation] = []

    ref = float(cost[0]) if len(x) else math.inf
    for k in range(1, len(x)):
        if not _within(float(cost[k]), ref, cost_rtol):
            violations.append(Violation(
                "cost_mismatch", k, float(cost[k]),
                f"cost {float(cost[k])!r} at location {k} differs from {ref!r} at location 0",
            ))
    if not ref <= empty * (1.0 + cost_rtol):
        violations.append(Violation(
            "profitable_deviation", 0, ref,
            f"occupied cost {ref!r} exceeds empty-location cost {empty!r}",
        ))
    is_nash = not violations

    is_stable = True
    if alloc.support_size > 1:
        for k in range(len(x)):
            if not grad[k] > grad_atol:
                is_stable = False
                violations.append(Violation(
                    "nonpositive_gradient", k, float(grad[k]),
                    f"cost gradient {float(grad[k])!r} at density {float(x[k])!r} is not positive",
                ))
    return EssReport(is_nash=is_nash, is_stable=is_stable, violations=tuple(violations))


def enumerate_uniform_ess(
    params: GameParams,
    population: Population,
    n_max: int = DEFAULT_N_MAX,
    cost_rtol: float = COST_RTOL,
    grad_atol: float = GRAD_ATOL,
) -> List[EssRecord]:
    """Every uniform allocation over ``n <= n_max`` locations that is an ESS.

    Uniform allocations suffice: equal costs at identical locations force
    equal densities.  Applies the same tests as :func:`check_ess`.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    n = np.arange(1, n_max + 1)
    x = 1.0 / n
    cost, grad = _costs_and_gradients(x, params, population)
    empty = empty_location_cost(params, population)
    nash = cost <= empty * (1.0 + cost_rtol)
    stable = (n == 1) | (grad > grad_atol)
    keep = np.flatnonzero(nash & stable)
    social = uniform_social_cost(n[keep], params)
    return [
        EssRecord(
            population_type=population,
            support_size=int(n[k]),
            density=float(x[k]),
            location_cost=float(cost[k]),
            social=float(s),
            stability_margin=float(grad[k]),
        )
        for k, s in zip(keep, social)
    ]


def _bisect(f, lo: float, hi: float, xtol: float = _ROOT_XTOL) -> float:
    """Root of ``f`` on ``[lo, hi]`` given ``f(lo) < 0 <= f(hi)``."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _first_crossing(f, grid: np.ndarray):
    """Bracket the first point where the sign of ``f`` turns from negative to nonnegative."""
    values = f(grid)
    neg = values < 0
    for k in range(len(grid) - 1):
        if neg[k] and not neg[k + 1]:
            return grid[k], grid[k + 1]
    return None


@dataclass(frozen=True)
class SelfishSupportBound:
    m_g: int
    x_bar: float  # nan when the selfish cost decreases on all of (0, 1]


def max_selfish_support(params: GameParams) -> SelfishSupportBound:
    """Upper bound on the support of any selfish ESS.

    The selfish cost decreases on ``(0, x_bar)``, where ``x_bar`` is the
    smallest positive root of its derivative.  No selfish ESS can sit below
    ``x_bar``, so the support is at most ``floor(1 / x_bar)``.
    """
    grid = np.geomspace(_SCAN_LOW, 1.0, _SCAN_POINTS)
    bracket = _first_crossing(lambda x: selfish_cost_derivative(x, params), grid)
    if bracket is None:
        return SelfishSupportBound(m_g=1, x_bar=math.nan)
    x_bar = float(_bisect(lambda x: selfish_cost_derivative(x, params), *map(float, bracket)))
    return SelfishSupportBound(m_g=max(1, math.floor(1.0 / x_bar)), x_bar=x_bar)


def altruistic_stability_interval(params: GameParams, points: int = _SCAN_POINTS) -> float:
    """Right end ``a`` of the interval ``(0, a)`` on which ``R''`` stays positive.

    ``R''`` shares its sign with ``2 - x r0 R'(x)``.  The first sign change on
    a uniform grid of ``(0, 1]`` is refined by bisection; ``a = 1`` when
    ``R''`` is positive on the whole grid.

    Raises
    ------
    DegenerateError
        For ``eta = 1`` or ``eta = 0``, where ``R''`` vanishes identically.
    """
    if params.eta in (0.0, 1.0):
        raise DegenerateError(f"R'' vanishes identically for eta = {params.eta}")
    grid = np.linspace(1.0 / points, 1.0, points)
    neg_curv = lambda x: -np.asarray(altruistic_cost_derivative(x, params))
    # negate so the crossing goes from negative (R'' > 0) to nonnegative
    values = neg_curv(grid)
    if not np.all(values < 0):
        k = int(np.argmax(values >= 0))
        if k == 0:
            return _bisect(lambda x: float(neg_curv(x)), 0.0, float(grid[0]))
        return _bisect(lambda x: float(neg_curv(x)), float(grid[k - 1]), float(grid[k]))
    return 1.0


def altruistic_ess_threshold(params: GameParams) -> int:
    """Smallest ``n0`` such that every uniform allocation with ``n >= n0`` is an altruistic ESS.

    Uses the sufficient condition ``1/n < a`` and ``R'(1/n) <= c + eta``:
    on ``(0, a)`` the marginal cost ``R'`` is increasing, so the set of
    admissible densities is an interval ``(0, b)``.
    """
    a = altruistic_stability_interval(params)
    limit = params.c + params.eta

    def excess(x):
        r = final_size_array(x, params)
        return float(final_size_derivative(x, r, params)) - limit

    b = a if excess(a) <= 0 else _bisect(excess, 0.0, a)
    return math.floor(1.0 / b) + 1
