"""Location-cost curves with equilibrium markers, ready for any plotting tool."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .epidemic import GameParams, final_size_array, final_size_derivative
from .equilibrium import DEFAULT_N_MAX, enumerate_uniform_ess
from .game import isolation_cost

__all__ = ["DEFAULT_QUARTET", "CurveSeries", "curve_series"]

# Two initial-infection levels crossed with two isolation costs.  At the
# higher eta the cheapest altruistic equilibrium costs more than the
# cheapest selfish one; at the lower eta the order flips.
DEFAULT_QUARTET = (
    GameParams(r0=2.0, eta=0.01, c=0.02),
    GameParams(r0=2.0, eta=0.01, c=0.05),
    GameParams(r0=2.0, eta=0.3, c=0.02),
    GameParams(r0=2.0, eta=0.3, c=0.05),
)


@dataclass
class CurveSeries:
    params: GameParams
    samples: List[dict]
    markers: List[dict]

    def best_marker_cost(self, population: str) -> float:
        costs = [m["selfish_cost"] for m in self.markers if m["type"] == population]
        return min(costs) if costs else float("inf")


def curve_series(
    params: GameParams,
    points: int = 500,
    lo: float = 1e-3,
    n_max: int = DEFAULT_N_MAX,
) -> CurveSeries:
    """Sample the selfish location cost on a log grid over ``[lo, 1]``.

    Each sample holds the total cost, its isolation and infection parts,
    and the altruistic marginal cost ``R'(x)``.  Markers list every uniform
    ESS density of both population types with at most ``n_max`` locations;
    the marker ``selfish_cost`` equals the social cost of that ESS.
    """
    x = np.geomspace(lo, 1.0, points)
    r = final_size_array(x, params)
    f = isolation_cost(x, params)
    p = r / x
    r1 = np.asarray(final_size_derivative(x, r, params), dtype=float) * np.ones_like(x)
    samples = [
        {
            "x": float(xi),
            "selfish_total": float(fi + pi),
            "isolation": float(fi),
            "infection": float(pi),
            "altruistic_marginal": float(ri),
        }
        for xi, fi, pi, ri in zip(x, f, p, r1)
    ]
    markers = []
    for population in ("selfish", "altruistic"):
        for rec in enumerate_uniform_ess(params, population, n_max):
            xm = rec.density
            rm = final_size_array(xm, params)
            markers.append({
                "type": population,
                "n": rec.support_size,
                "density": xm,
                "selfish_cost": float(isolation_cost(xm, params) + rm / xm),
                "altruistic_cost": float(final_size_derivative(xm, rm, params)),
            })
    return CurveSeries(params=params, samples=samples, markers=markers)
