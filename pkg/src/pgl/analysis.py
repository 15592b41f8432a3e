"""Optimum bounds and price-of-anarchy certificates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np

from .epidemic import GameParams
from .equilibrium import (
    DEFAULT_N_MAX,
    altruistic_ess_threshold,
    check_ess,
    enumerate_uniform_ess,
    max_selfish_support,
)
from .game import Allocation, uniform_social_cost

__all__ = [
    "OptimumBounds",
    "PoaReport",
    "AltruisticPoaEntry",
    "optimal_social_cost",
    "selfish_ess_cost_bound",
    "selfish_poa_bound",
    "selfish_poa",
    "altruistic_poa_growth",
    "altruistic_witness_size",
]

CERT_ATOL = 1e-9


@dataclass(frozen=True)
class OptimumBounds:
    opt_lower: float
    opt_upper: float
    argmin_n: int


@dataclass(frozen=True)
class PoaReport:
    worst_ess_cost: float
    worst_ess_support: int
    ess_support_sizes: tuple
    opt_lower: float
    opt_upper: float
    opt_argmin_n: int
    poa_lower: float
    poa_upper_estimate: float
    theorem_bound: float
    ess_cost_bound: float
    ess_cost_bound_satisfied: bool
    bound_satisfied: bool

    @property
    def certified(self) -> bool:
        return self.bound_satisfied and self.ess_cost_bound_satisfied

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ess_support_sizes"] = list(self.ess_support_sizes)
        return d


@dataclass(frozen=True)
class AltruisticPoaEntry:
    k: int
    is_ess: bool
    social: float
    opt_upper: float
    ratio: Optional[float]
    floor: float
    error: Optional[str] = None

    def as_dict(self) -> dict:
        return asdict(self)


def optimal_social_cost(params: GameParams, n_max: int = DEFAULT_N_MAX) -> OptimumBounds:
    """Bounds on the optimal social cost.

    The lower bound ``c`` is exact for every allocation (at least one
    location is used).  The upper bound is the best uniform allocation over
    at most ``n_max`` locations; it is never claimed to be optimal.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    n = np.arange(1, n_max + 1)
    costs = uniform_social_cost(n, params)
    k = int(np.argmin(costs))
    return OptimumBounds(opt_lower=params.c, opt_upper=float(costs[k]), argmin_n=int(n[k]))


def selfish_ess_cost_bound(params: GameParams) -> float:
    """Social cost ceiling for every selfish ESS: ``max(2, c r0 + 1)``."""
    return max(2.0, params.c * params.r0 + 1.0)


def selfish_poa_bound(params: GameParams) -> float:
    return 3.0 / params.c + params.r0


def selfish_poa(params: GameParams, n_max: Optional[int] = None) -> PoaReport:
    """Price of anarchy of a selfish population.

    The worst ESS is taken over all uniform ESS with at most ``n_max``
    locations; ``n_max`` defaults to the support bound from
    :func:`max_selfish_support`, which makes the enumeration complete.
    """
    bound = max_selfish_support(params).m_g
    if n_max is None:
        n_max = bound
    elif n_max < bound:
        raise ValueError(f"n_max={n_max} is below the selfish support bound {bound}")
    records = enumerate_uniform_ess(params, "selfish", n_max)
    worst = max(records, key=lambda rec: rec.social)
    opt = optimal_social_cost(params, max(n_max, DEFAULT_N_MAX))
    ess_bound = selfish_ess_cost_bound(params)
    poa_bound = selfish_poa_bound(params)
    poa_upper = worst.social / opt.opt_lower
    return PoaReport(
        worst_ess_cost=worst.social,
        worst_ess_support=worst.support_size,
        ess_support_sizes=tuple(rec.support_size for rec in records),
        opt_lower=opt.opt_lower,
        opt_upper=opt.opt_upper,
        opt_argmin_n=opt.argmin_n,
        poa_lower=worst.social / opt.opt_upper,
        poa_upper_estimate=poa_upper,
        theorem_bound=poa_bound,
        ess_cost_bound=ess_bound,
        ess_cost_bound_satisfied=all(rec.social <= ess_bound + CERT_ATOL for rec in records),
        bound_satisfied=poa_upper <= poa_bound,
    )


def altruistic_poa_growth(
    params: GameParams,
    support_sizes: Sequence[int],
    n_max: int = DEFAULT_N_MAX,
) -> List[AltruisticPoaEntry]:
    """Ratio of altruistic ESS cost to the best known allocation, per support size.

    Each ratio is a certified lower bound on the altruistic price of
    anarchy and is reported next to the analytic floor ``K c / (c + 1)``.
    Sizes whose uniform allocation is not an altruistic ESS get an error
    entry instead of a ratio.
    """
    opt = optimal_social_cost(params, n_max)
    entries = []
    for k in support_sizes:
        k = int(k)
        floor = k * params.c / (params.c + 1.0)
        if k < 1:
            entries.append(AltruisticPoaEntry(k, False, math.nan, opt.opt_upper, None, floor,
                                              error="support size must be at least 1"))
            continue
        social = float(uniform_social_cost(k, params))
        report = check_ess(Allocation.uniform(k), "altruistic", params)
        if not report.verdict:
            kinds = sorted({v.kind for v in report.violations})
            entries.append(AltruisticPoaEntry(k, False, social, opt.opt_upper, None, floor,
                                              error="not an altruistic ESS: " + ", ".join(kinds)))
            continue
        entries.append(AltruisticPoaEntry(k, True, social, opt.opt_upper, social / opt.opt_upper, floor))
    return entries


def altruistic_witness_size(params: GameParams, target: float) -> int:
    """A support size whose altruistic ESS has cost ratio above ``target``.

    Any ``K > target (c + 1) / c`` that also meets the sufficient ESS
    condition works, since the ratio is at least ``K c / (c + 1)``.
    """
    k = math.floor(target * (params.c + 1.0) / params.c) + 1
    return max(k, altruistic_ess_threshold(params))
