"""Numerical certificate suite over a parameter grid.

Each check runs independently for one parameter tuple and yields a
:class:`CheckResult`.  Results are sorted by ``(check, r0, eta, c)`` so the
report does not depend on the order in which grid points finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .analysis import (
    altruistic_poa_growth,
    altruistic_witness_size,
    selfish_ess_cost_bound,
    selfish_poa,
    selfish_poa_bound,
)
from .epidemic import (
    GameParams,
    attack_probability_derivative,
    final_size_array,
    final_size_derivative,
    final_size_second_derivative,
    simulate_sir,
)
from .equilibrium import (
    altruistic_stability_interval,
    check_ess,
    enumerate_uniform_ess,
    max_selfish_support,
)
from .game import Allocation, altruistic_cost_derivative

__all__ = [
    "DEFAULT_GRID",
    "CheckResult",
    "run_verification",
    "slope_at_zero_fd",
    "curvature_at_zero_fd",
    "density_grid",
]

DEFAULT_GRID: Dict[str, List[float]] = {
    "r0": [0.5, 1.0, 2.0, 4.0],
    "eta": [0.001, 0.01, 0.1, 0.5],
    "c": [0.01, 0.1, 1.0, 5.0],
}

RESIDUAL_TOL = 1e-10
ODE_TOL = 1e-6
SLOPE_TOL = 1e-8
CURVATURE_TOL = 1e-6
THRESHOLD_TOL = 1e-8
ATTACK_SLOPE_TOL = 1e-10
COST_TOL = 1e-9
POA_TARGET = 10.0


@dataclass(frozen=True)
class CheckResult:
    check: str
    r0: float
    eta: float
    c: Optional[float]
    passed: bool
    value: float
    tolerance: float
    detail: str

    def sort_key(self):
        return (self.check, self.r0, self.eta, -1.0 if self.c is None else self.c)

    def as_dict(self) -> dict:
        return asdict(self)


def density_grid() -> np.ndarray:
    """Densities 0.05, 0.10, ..., 1.00."""
    return np.arange(1, 21) * 0.05


def slope_at_zero_fd(params: GameParams, h: float = 1e-7) -> float:
    """Second-order one-sided difference for ``R'(0)``, using ``R(0) = 0``."""
    r1, r2 = final_size_array(np.array([h, 2 * h]), params)
    return (4.0 * r1 - r2) / (2.0 * h)


def curvature_at_zero_fd(params: GameParams, h: float = 1e-5) -> float:
    """Second-order one-sided difference for ``R''(0)``, using ``R(0) = 0``."""
    r1, r2, r3 = final_size_array(np.array([h, 2 * h, 3 * h]), params)
    return (-5.0 * r1 + 4.0 * r2 - r3) / h**2


def _result(name, params, with_c, passed, value, tol, detail):
    return CheckResult(
        check=name,
        r0=params.r0,
        eta=params.eta,
        c=params.c if with_c else None,
        passed=bool(passed),
        value=float(value),
        tolerance=float(tol),
        detail=detail,
    )


def _disease_checks(params: GameParams, samples: int) -> List[CheckResult]:
    out = []
    r0, eta = params.r0, params.eta
    x = density_grid()
    r = final_size_array(x, params)

    residual = np.abs(x - (1 - eta) * x * np.exp(-r0 * r) - r)
    bracketed = bool(np.all((eta * x <= r) & (r <= x)))
    out.append(_result("final_size_residual", params, False,
                       residual.max() <= RESIDUAL_TOL and bracketed, residual.max(), RESIDUAL_TOL,
                       f"max residual over {len(x)} densities; bracketed={bracketed}"))

    gaps, warned = [], 0
    for xi, ri in zip(x, r):
        traj = simulate_sir(float(xi), params)
        warned += traj.warning is not None
        gaps.append(abs(traj.terminal_r - ri))
    gap = max(gaps)
    out.append(_result("ode_cross_validation", params, False,
                       gap <= ODE_TOL and not warned, gap, ODE_TOL,
                       f"max |RK4 terminal r - final size|; {warned} runs missed extinction"))

    slope = slope_at_zero_fd(params)
    out.append(_result("slope_at_zero", params, False,
                       abs(slope - eta) <= SLOPE_TOL, abs(slope - eta), SLOPE_TOL,
                       f"finite-difference R'(0)={slope!r} vs eta"))

    expected = 2 * r0 * eta * (1 - eta)
    implicit = final_size_second_derivative(0.0, 0.0, eta, params)
    fd = curvature_at_zero_fd(params)
    err = max(abs(implicit - expected), abs(fd - expected))
    out.append(_result("curvature_at_zero", params, False,
                       err <= CURVATURE_TOL, err, CURVATURE_TOL,
                       f"implicit R''(0)={implicit!r}, finite difference {fd!r}, expected {expected!r}"))

    xt = 1.0 / r0
    slope_t = final_size_derivative(xt, final_size_array(xt, params), params)
    out.append(_result("unit_slope_at_threshold", params, False,
                       abs(slope_t - 1) <= THRESHOLD_TOL, abs(slope_t - 1), THRESHOLD_TOL,
                       f"R'(1/r0)={slope_t!r}"))

    above = np.linspace(xt, max(1.0, 2 * xt), samples + 1)[1:]
    slope_above = np.asarray(final_size_derivative(above, final_size_array(above, params), params))
    below = np.linspace(0.0, xt, samples + 1)[1:-1]
    slope_below = np.asarray(final_size_derivative(below, final_size_array(below, params), params))
    ok = bool(np.all(slope_above > 1) and np.all(slope_below <= 1))
    out.append(_result("threshold_ordering", params, False, ok,
                       min(slope_above.min() - 1, 1 - slope_below.max()), 0.0,
                       "R' > 1 above 1/r0 and R' <= 1 below it (value: smallest margin)"))

    xs = np.linspace(0.0, xt, samples + 1)[1:]
    pprime = np.asarray(attack_probability_derivative(xs, params))
    out.append(_result("attack_slope_bound", params, False,
                       pprime.max() <= r0 + ATTACK_SLOPE_TOL, pprime.max() - r0, ATTACK_SLOPE_TOL,
                       f"max p'(x) - r0 over {samples} densities in (0, 1/r0]"))

    a = altruistic_stability_interval(params)
    xa = np.linspace(0.0, a, samples + 1)[1:-1]
    curv = np.asarray(altruistic_cost_derivative(xa, params))
    out.append(_result("convex_near_zero", params, False,
                       a > 0 and bool(np.all(curv > 0)), a, 0.0,
                       f"R'' > 0 on sampled (0, a), a={a!r}"))
    return out


def _game_checks(params: GameParams, samples: int) -> List[CheckResult]:
    out = []
    eta, c = params.eta, params.c
    report = selfish_poa(params)
    ess_bound = selfish_ess_cost_bound(params)
    out.append(_result("selfish_ess_cost_bound", params, True,
                       report.worst_ess_cost <= ess_bound + COST_TOL,
                       report.worst_ess_cost - ess_bound, COST_TOL,
                       f"worst selfish ESS cost {report.worst_ess_cost!r} (n={report.worst_ess_support}) "
                       f"vs max(2, c r0 + 1) = {ess_bound!r}"))
    ratio = report.worst_ess_cost / c
    poa_bound = selfish_poa_bound(params)
    out.append(_result("selfish_poa_bound", params, True,
                       ratio <= poa_bound, ratio - poa_bound, 0.0,
                       f"worst cost / c = {ratio!r} vs 3/c + r0 = {poa_bound!r}"))

    bound = max_selfish_support(params)
    sizes = report.ess_support_sizes
    out.append(_result("selfish_support_bound", params, True,
                       max(sizes) <= bound.m_g, max(sizes) - bound.m_g, 0.0,
                       f"selfish ESS sizes {list(sizes)} vs M_G={bound.m_g}"))

    single = Allocation([1.0])
    selfish_single = check_ess(single, "selfish", params).verdict
    out.append(_result("max_density_selfish_ess", params, True, selfish_single,
                       float(selfish_single), 0.0, "x1 = 1 is a selfish ESS"))

    alt_single = check_ess(single, "altruistic", params).verdict
    applies = c + eta <= 1
    out.append(_result("max_density_not_altruistic_ess", params, True,
                       (not alt_single) if applies else True, float(alt_single), 0.0,
                       "x1 = 1 is not an altruistic ESS when c + eta <= 1"
                       if applies else "not applicable: c + eta > 1"))

    records = enumerate_uniform_ess(params, "altruistic", 200)
    worst = max((rec.location_cost for rec in records), default=-math.inf)
    limit = c + eta
    out.append(_result("altruistic_incentive_bound", params, True,
                       worst <= limit * (1 + COST_TOL), worst - limit, COST_TOL,
                       f"largest altruistic ESS location cost vs c + eta, n <= 200 ({len(records)} ESS)"))

    k = altruistic_witness_size(params, POA_TARGET)
    entry = altruistic_poa_growth(params, [k])[0]
    ok = entry.is_ess and entry.ratio is not None and entry.ratio > POA_TARGET and entry.ratio >= entry.floor
    out.append(_result("altruistic_poa_unbounded", params, True, ok,
                       entry.ratio if entry.ratio is not None else math.nan, POA_TARGET,
                       f"uniform K={k} altruistic ESS has cost ratio above target {POA_TARGET}"))
    return out


def run_verification(
    grid: Dict[str, Sequence[float]] = DEFAULT_GRID,
    samples: int = 100,
    threads: Optional[int] = None,
) -> List[CheckResult]:
    """Run every certificate on every grid point; results sorted by tuple."""
    tasks: List[Callable[[], List[CheckResult]]] = []
    for r0, eta in product(grid["r0"], grid["eta"]):
        params = GameParams(r0, eta, grid["c"][0])
        if eta < 1.0:
            tasks.append(lambda p=params: _disease_checks(p, samples))
        for c in grid["c"]:
            tasks.append(lambda p=GameParams(r0, eta, c): _game_checks(p, samples))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        chunks = list(pool.map(lambda task: task(), tasks))
    results = [r for chunk in chunks for r in chunk]
    return sorted(results, key=CheckResult.sort_key)
