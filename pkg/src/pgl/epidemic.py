"""Density-based SIR model at a single location.

The final size ``R(x)`` of an epidemic at a location holding population
density ``x`` solves

    R = x - (1 - eta) * x * exp(-r0 * R)

on ``[eta * x, x]``.  Everything in this module is a pure function of its
inputs.  The array solver processes every element independently, so a
density produces bit-identical results whether it is solved alone or as
part of a batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "PglError",
    "DomainError",
    "SolverError",
    "SingularityError",
    "DegenerateError",
    "GameParams",
    "FinalSizeSolution",
    "SirTrajectory",
    "final_size",
    "final_size_array",
    "attack_probability",
    "final_size_derivative",
    "final_size_second_derivative",
    "attack_probability_derivative",
    "simulate_sir",
    "BRACKET_RTOL",
    "RESIDUAL_TOL",
    "SINGULARITY_GUARD",
]

BRACKET_RTOL = 1e-8
RESIDUAL_TOL = 1e-12
SINGULARITY_GUARD = 1e-12
_NEWTON_MAXITER = 50


class PglError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PglError, ValueError):
    pass


class SolverError(PglError, RuntimeError):
    """The final-size iteration did not reach the residual tolerance."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


class SingularityError(PglError, ArithmeticError):
    """Implicit derivative requested off the stable final-size branch."""


class DegenerateError(PglError, ValueError):
    pass


@dataclass(frozen=True)
class GameParams:
    """A game instance ``(r0, eta, c)``.

    ``eta = 0`` describes a world without disease.  It is not a valid game
    instance and is only accepted through :meth:`disease_free`.
    """

    r0: float
    eta: float
    c: float
    diagnostic: bool = field(default=False, repr=False)

    def __post_init__(self):
        for name in ("r0", "eta", "c"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.r0 <= 0:
            raise DomainError(f"r0 must be positive, got {self.r0}")
        if self.c <= 0:
            raise DomainError(f"c must be positive, got {self.c}")
        if self.diagnostic:
            if self.eta != 0.0:
                raise DomainError("diagnostic mode is reserved for eta = 0")
        elif not 0.0 < self.eta <= 1.0:
            raise DomainError(f"eta must lie in (0, 1], got {self.eta}")

    @classmethod
    def disease_free(cls, r0: float, c: float) -> "GameParams":
        """Parameters with no initial infection (``eta = 0``)."""
        return cls(r0=r0, eta=0.0, c=c, diagnostic=True)

    def as_dict(self) -> dict:
        return {"r0": self.r0, "eta": self.eta, "c": self.c}


@dataclass(frozen=True)
class FinalSizeSolution:
    x: float
    r_inf: float
    p: float
    residual: float
    r_prime: float
    r_double_prime: float


@dataclass(frozen=True)
class SirTrajectory:
    times: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray
    terminal_r: float
    warning: Optional[str] = None


def _residual(x, r, r0, eta):
    return x - (1.0 - eta) * x * np.exp(-r0 * r) - r


def final_size_array(x, params: GameParams) -> np.ndarray:
    """Final size for an array of densities ``x >= 0``.

    Bisection on ``[eta*x, x]`` down to a relative bracket width of
    ``BRACKET_RTOL``, followed by a Newton polish.  ``x = 0`` maps to 0.

    Raises
    ------
    DomainError
        If any density is negative or not finite.
    SolverError
        If an element fails to reach ``RESIDUAL_TOL``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise DomainError("densities must be finite and nonnegative")
    r0, eta = params.r0, params.eta
    if eta == 1.0:
        return x.copy()
    if eta == 0.0:
        # disease-free branch: I(0) = 0 means nobody is ever infected
        return np.zeros_like(x)

    lo = eta * x
    hi = x.copy()
    # g(lo) >= 0 > g(hi) for x > 0, and the bracket width shrinks by the
    # same factor for every element, so a fixed iteration count suffices.
    n_bisect = math.ceil(math.log2((1.0 - eta) / BRACKET_RTOL))
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        above = _residual(x, mid, r0, eta) > 0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)

    r = 0.5 * (lo + hi)
    active = x > 0
    for _ in range(_NEWTON_MAXITER):
        if not active.any():
            break
        e = (1.0 - eta) * np.exp(-r0 * r)
        g = x - x * e - r
        dg = x * r0 * e - 1.0
        step = np.where(active, g / np.where(active, dg, -1.0), 0.0)
        r_new = np.clip(r - step, lo, hi)
        converged = np.abs(r_new - r) <= 4 * np.finfo(float).eps * np.abs(r_new)
        r = np.where(active, r_new, r)
        active &= ~converged

    res = np.abs(_residual(x, r, r0, eta))
    bad = res > RESIDUAL_TOL
    if bad.any():
        k = int(np.flatnonzero(bad.ravel())[0])
        raise SolverError(
            f"final-size solve did not converge at x={x.ravel()[k]!r} "
            f"(residual {res.ravel()[k]:.3e})",
            bracket=(float(lo.ravel()[k]), float(hi.ravel()[k])),
        )
    return r


def _check_density(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"density must be positive, got {x!r}")
    return x


def final_size(x: float, params: GameParams) -> FinalSizeSolution:
    """Solve for the final size at density ``x`` and its derivatives.

    >>> sol = final_size(0.5, GameParams(r0=2, eta=1, c=1))
    >>> sol.r_inf, sol.p
    (0.5, 1.0)
    """
    x = _check_density(x)
    r = float(final_size_array(x, params))
    if params.eta not in (0.0, 1.0) and _denominator(x, r, params) <= 0:
        raise SolverError(f"root at x={x!r} is off the stable branch", bracket=(r, r))
    r1 = final_size_derivative(x, r, params)
    r2 = final_size_second_derivative(x, r, r1, params)
    return FinalSizeSolution(
        x=x,
        r_inf=r,
        p=r / x,
        residual=float(abs(_residual(x, r, params.r0, params.eta))),
        r_prime=r1,
        r_double_prime=r2,
    )


def attack_probability(x, params: GameParams):
    """Probability that an individual at density ``x`` is eventually infected.

    Extended continuously by ``p(0) = eta``.  Accepts scalars or arrays.
    """
    xa = np.asarray(x, dtype=float)
    r = final_size_array(xa, params)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(xa > 0, r / np.where(xa > 0, xa, 1.0), params.eta)
    return float(p) if p.ndim == 0 else p


def _denominator(x, r, params: GameParams):
    return 1.0 - x * params.r0 * (1.0 - params.eta) * np.exp(-params.r0 * r)


def _guard(denom):
    if np.any(np.asarray(denom) <= SINGULARITY_GUARD):
        raise SingularityError(
            "implicit-derivative denominator vanished; "
            "(x, r_inf) is not on the stable final-size branch"
        )


def _scalar_or_array(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def final_size_derivative(x, r_inf, params: GameParams):
    """First derivative of the final size with respect to density.

    Obtained by implicit differentiation of the final-size relation::

        R' = (1 - (1-eta) e^{-r0 R}) / (1 - x r0 (1-eta) e^{-r0 R})

    which reduces to ``eta`` at ``x = 0``.
    """
    if params.eta == 1.0:
        return _scalar_or_array(np.ones_like(np.asarray(x, dtype=float)))
    if params.eta == 0.0:
        return _scalar_or_array(np.zeros_like(np.asarray(x, dtype=float)))
    x = np.asarray(x, dtype=float)
    r_inf = np.asarray(r_inf, dtype=float)
    denom = _denominator(x, r_inf, params)
    _guard(denom)
    numer = 1.0 - (1.0 - params.eta) * np.exp(-params.r0 * r_inf)
    return _scalar_or_array(numer / denom)


def final_size_second_derivative(x, r_inf, r_prime, params: GameParams):
    """Second derivative of the final size with respect to density.

    Differentiating the first-derivative identity once more and isolating
    ``R''`` gives::

        R'' = E r0 R' (2 - x r0 R') / (1 - x r0 E),   E = (1-eta) e^{-r0 R}

    At ``x = 0`` this is ``2 r0 eta (1 - eta)``.
    """
    if params.eta in (0.0, 1.0):
        return _scalar_or_array(np.zeros_like(np.asarray(x, dtype=float)))
    x = np.asarray(x, dtype=float)
    r_prime = np.asarray(r_prime, dtype=float)
    e = (1.0 - params.eta) * np.exp(-params.r0 * np.asarray(r_inf, dtype=float))
    denom = 1.0 - x * params.r0 * e
    _guard(denom)
    return _scalar_or_array(e * params.r0 * r_prime * (2.0 - x * params.r0 * r_prime) / denom)


def attack_probability_derivative(x, params: GameParams):
    """``p'(x) = (1 - p(x)) r0 R'(x)``; equals ``(1-eta) r0 eta`` at 0."""
    if params.eta in (0.0, 1.0):
        return _scalar_or_array(np.zeros_like(np.asarray(x, dtype=float)))
    xa = np.asarray(x, dtype=float)
    r = final_size_array(xa, params)
    p = attack_probability(xa, params)
    r1 = final_size_derivative(xa, r, params)
    return _scalar_or_array((1.0 - np.asarray(p)) * params.r0 * np.asarray(r1))


def simulate_sir(
    x: float,
    params: GameParams,
    horizon: float = 1e4,
    step: float = 0.01,
    extinction: float = 1e-10,
    stop_at_extinction: bool = True,
) -> SirTrajectory:
    """Integrate the SIR equations at one location with classical RK4.

    Time is measured in recovery periods (``gamma = 1``, ``beta = r0``).
    Integration stops at ``horizon``, or earlier once the infected mass
    drops below ``extinction`` if ``stop_at_extinction`` is set.  If the
    infected mass is still above ``extinction`` at the end, the returned
    trajectory carries a warning and ``terminal_r`` underestimates the
    final size.
    """
    x = _check_density(x)
    if not horizon > 0 or not step > 0:
        raise DomainError("horizon and step must be positive")
    beta = params.r0
    eta = params.eta

    def rhs(s, i):
        infect = beta * i * s
        return -infect, infect - i, i

    s, i, r = (1.0 - eta) * x, eta * x, 0.0
    t = 0.0
    times, ss, ii, rr = [t], [s], [i], [r]
    n_steps = math.ceil(horizon / step)
    h = step
    for k in range(n_steps):
        if stop_at_extinction and i < extinction:
            break
        h = min(step, horizon - t)
        ds1, di1, dr1 = rhs(s, i)
        ds2, di2, dr2 = rhs(s + 0.5 * h * ds1, i + 0.5 * h * di1)
        ds3, di3, dr3 = rhs(s + 0.5 * h * ds2, i + 0.5 * h * di2)
        ds4, di4, dr4 = rhs(s + h * ds3, i + h * di3)
        s += h / 6.0 * (ds1 + 2 * ds2 + 2 * ds3 + ds4)
        i += h / 6.0 * (di1 + 2 * di2 + 2 * di3 + di4)
        r += h / 6.0 * (dr1 + 2 * dr2 + 2 * dr3 + dr4)
        t = (k + 1) * step if k + 1 < n_steps else horizon
        times.append(t)
        ss.append(s)
        ii.append(i)
        rr.append(r)

    warning = None
    if i >= extinction:
        warning = (
            f"horizon {horizon} too short: infected mass {i:.3e} "
            f"still above extinction threshold {extinction:.1e}"
        )
    return SirTrajectory(
        times=np.array(times),
        s=np.array(ss),
        i=np.array(ii),
        r=np.array(rr),
        terminal_r=r,
        warning=warning,
    )
