"""Trophozoite population plant: parameters, growth rate, vector field.

The plant couples a logistic population x1 (cells/ml) with a scalar drug
resistance level x2 (dimensionless). The drug dose u (ug/ml) enters the
growth rate linearly with efficiency beta_d. The resistance level feeds
back into growth through a Gaussian-windowed term and is itself driven
by the population fraction x1/K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

from scipy.optimize import bisect

from .errors import NumericError, ValidationError


@dataclass(frozen=True)
class ModelParams:
    """The six uncertain plant constants. All must be strictly positive."""

    r0: float      # natural growth rate, 1/hour
    K: float       # carrying capacity, cells/ml
    beta_d: float  # drug efficiency, per (ug/ml)/hour
    beta_m: float  # resistance growth-rate weight, 1/hour
    w_m: float     # resistance window width, dimensionless
    sigma: float   # resistance dispersion, dimensionless

    def __post_init__(self) -> None:
        bad = [f.name for f in fields(self)
               if not (math.isfinite(getattr(self, f.name)) and getattr(self, f.name) > 0)]
        if bad:
            raise ValidationError(
                "model parameters must be positive and finite; violated by: "
                + ", ".join(bad))

    @property
    def resistance_decay_rate(self) -> float:
        """sigma^2 * beta_m, the linear decay rate of x2 (1/hour)."""
        return self.sigma * self.sigma * self.beta_m


class PlantState(NamedTuple):
    x1: float  # population, cells/ml (>= 0 along valid trajectories)
    x2: float  # resistance level, dimensionless (any sign)


class Derivative(NamedTuple):
    dx1: float  # cells/ml/hour
    dx2: float  # 1/hour


def growth_rate(p: ModelParams, s: PlantState, u: float) -> float:
    """Instantaneous per-capita growth rate (1/hour); may be negative.

    r = r0*x1/K + beta_m*x2*exp(-x2^2/w_m) - beta_d*u
    """
    if u < 0:
        raise ValidationError(f"dose must be nonnegative, got {u}")
    x1, x2 = s
    return (p.r0 * x1 / p.K
            + p.beta_m * x2 * math.exp(-x2 * x2 / p.w_m)
            - p.beta_d * u)


def vector_field(p: ModelParams, s: PlantState, u: float) -> Derivative:
    """Full plant derivative at state s under dose u (ug/ml)."""
    x1, x2 = s
    r = growth_rate(p, s, u)
    a = p.resistance_decay_rate
    dx1 = r * x1 * (1.0 - x1 / p.K)
    dx2 = -a * x2 + a * math.sqrt(p.w_m / 2.0) * math.exp(-x2 * x2 / p.w_m) * x1 / p.K
    return Derivative(dx1, dx2)


def output(s: PlantState) -> float:
    """Measured output: the population count x1 (cells/ml)."""
    return s.x1


def open_loop_equilibrium(p: ModelParams) -> tuple[float, float]:
    """Zero-dose fixed point (x1*, x2*) of the plant.

    x1* is the carrying capacity K. x2* solves
    x = sqrt(w_m/2)*exp(-x^2/w_m), found by bisection on (0, sqrt(w_m/2)].
    Note x2* sits well below sqrt(w_m/2): the Gaussian factor at the root
    is ~0.75, not 1, so the flux-peak abscissa is not the fixed point.
    """
    hi = math.sqrt(p.w_m / 2.0)
    lo = 1e-12 * hi

    def g(x: float) -> float:
        return hi * math.exp(-x * x / p.w_m) - x

    if not (g(lo) > 0.0 and g(hi) < 0.0):
        raise ValidationError(
            f"root bracket ({lo:g}, {hi:g}] does not straddle a sign change")
    try:
        # xtol tighter than the 1e-10 residual contract so |g| at the
        # returned root clears it with margin.
        x2_star = bisect(g, lo, hi, xtol=1e-12, maxiter=200)
    except RuntimeError as e:  # scipy signals non-convergence this way
        raise NumericError(f"equilibrium root finding failed: {e}") from e
    return p.K, float(x2_star)
