"""Closed-form bounds, metrics, unit conversion, and robustness sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .control import UM_PER_UGML, AdaptiveConfig, ControllerConfig, min_eta
from .errors import ValidationError
from .model import ModelParams
from .observer import ObserverParams
from .sim import SimConfig, Trajectory, check_envelope, simulate


@dataclass(frozen=True)
class UncertaintyRanges:
    """Closed [low, high] interval per plant parameter."""

    r0: tuple[float, float]
    K: tuple[float, float]
    beta_d: tuple[float, float]
    beta_m: tuple[float, float]
    w_m: tuple[float, float]
    sigma: tuple[float, float]

    def __post_init__(self) -> None:
        for f in fields(self):
            lo, hi = getattr(self, f.name)
            if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo <= hi):
                raise ValidationError(
                    f"range for {f.name} must satisfy 0 < low <= high, got [{lo}, {hi}]")

    @classmethod
    def fractional(cls, p: ModelParams, frac: float) -> "UncertaintyRanges":
        """Symmetric +-frac intervals around a nominal parameter set."""
        if not 0 <= frac < 1:
            raise ValidationError(f"fraction must lie in [0, 1), got {frac}")
        return cls(**{f.name: ((1 - frac) * getattr(p, f.name),
                               (1 + frac) * getattr(p, f.name))
                      for f in fields(p)})


@dataclass(frozen=True)
class McSummary:
    """Envelope-violation statistics over a Monte Carlo parameter sweep."""

    n_runs: int
    violations: tuple[int, ...]      # envelope violations per run, run order
    zero_violation_fraction: float
    t10_min: float                   # stats of time to 10% of y(0), hours
    t10_median: float
    t10_max: float
    t10_not_reached: int             # runs never crossing the 10% line
    seed: int
    certified: bool                  # design dominates the whole ranges box


def riccati_bound(y0: float, K: float, delta: float, t):
    """Tightened decay bound: y0*exp(-delta*t) / (1 - (y0/K)*(exp(-delta*t) - 1)).

    Solves dy/dt = -delta*y*(1 + y/K), y(0) = y0: the quadratic term adds
    to the decay, so the bound sits at or below the naive envelope
    y0*exp(-delta*t) everywhere. Accepts scalar or array t.
    """
    if not 0 <= y0 <= K:
        raise ValidationError(f"need 0 <= y0 <= K, got y0={y0}, K={K}")
    if delta <= 0:
        raise ValidationError(f"decay rate delta must be positive, got {delta}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValidationError("time must be nonnegative")
    e = np.exp(-delta * t_arr)
    out = y0 * e / (1.0 - (y0 / K) * (e - 1.0))
    return float(out) if np.isscalar(t) else out


def time_to_fraction(traj: Trajectory, frac: float) -> float | None:
    """First time y(t)/y(0) <= frac, or None when never reached.

    Interpolates linearly in log-population between samples: the decay
    is near-exponential, so log interpolation keeps the crossing time
    insensitive to the record stride.
    """
    if len(traj) == 0:
        raise ValidationError("trajectory is empty")
    if not 0 < frac <= 1:
        raise ValidationError(f"fraction must lie in (0, 1], got {frac}")
    y = traj.x1
    y0 = float(y[0])
    if y0 <= 0:
        raise ValidationError("y(0) must be positive")
    target = frac * y0
    below = np.flatnonzero(y <= target)
    if below.size == 0:
        return None
    k = int(below[0])
    if k == 0:
        return 0.0
    ya, yb = float(y[k - 1]), float(y[k])
    ta, tb = float(traj.t[k - 1]), float(traj.t[k])
    if yb <= 0.0:  # log interpolation impossible past extinction
        return tb
    w = (math.log(ya) - math.log(target)) / (math.log(ya) - math.log(yb))
    return ta + w * (tb - ta)


def convert_dose(value: float, direction: str) -> float:
    """Convert a dose between ug/ml and uM (factor 5.8425).

    direction: "ugml_to_um" or "um_to_ugml".
    """
    if value < 0:
        raise ValidationError(f"dose must be nonnegative, got {value}")
    if direction == "ugml_to_um":
        return value * UM_PER_UGML
    if direction == "um_to_ugml":
        return value / UM_PER_UGML
    raise ValidationError(
        f"unknown direction {direction!r}; expected 'ugml_to_um' or 'um_to_ugml'")


def monte_carlo(ranges: UncertaintyRanges, design: AdaptiveConfig,
                o: ObserverParams, sc: SimConfig, n: int, seed: int) -> McSummary:
    """Sweep n independent uniform parameter draws under one adaptive design.

    Each run simulates the closed loop and counts decay-envelope
    violations against the design's delta. The certified flag is true
    only when the design dominates the worst corner of the ranges box
    (r0_bar > high(r0)/low(K), beta_m_bar > high(beta_m), beta_d_low <
    low(beta_d)) and eta clears the guarantee floor; a non-dominating
    design still runs, it just is not certified.

    Draws are uniform and independent per parameter (the ranges carry no
    distribution; uniform is the maximum-entropy choice), in fixed field
    order, so a given seed reproduces bit-identical results.
    """
    if n < 1:
        raise ValidationError(f"need at least one run, got n={n}")
    x2b = sc.mutation_bound_0
    xh0 = abs(sc.x2_hat_0)
    certified = (design.r0_bar > ranges.r0[1] / ranges.K[0]
                 and design.beta_m_bar > ranges.beta_m[1]
                 and design.beta_d_low < ranges.beta_d[0]
                 and design.eta >= min_eta(design.beta_m_bar, x2b, xh0,
                                           design.delta))

    rng = np.random.default_rng(seed)
    ctrl = ControllerConfig("adaptive", adaptive=design)
    violations: list[int] = []
    t10s: list[float] = []
    for _ in range(n):
        draws = {f.name: float(rng.uniform(lo, hi))
                 for f in fields(ranges)
                 for lo, hi in [getattr(ranges, f.name)]}
        p = ModelParams(**draws)
        traj = simulate(p, o, ctrl, sc, enforce_design=False)
        violations.append(len(check_envelope(traj, sc.x1_0, design.delta)))
        t10 = time_to_fraction(traj, 0.10)
        t10s.append(math.nan if t10 is None else t10)

    t10_arr = np.array(t10s)
    reached = t10_arr[~np.isnan(t10_arr)]
    stats = ((float(reached.min()), float(np.median(reached)), float(reached.max()))
             if reached.size else (math.nan, math.nan, math.nan))
    return McSummary(
        n_runs=n,
        violations=tuple(violations),
        zero_violation_fraction=sum(v == 0 for v in violations) / n,
        t10_min=stats[0], t10_median=stats[1], t10_max=stats[2],
        t10_not_reached=int(np.isnan(t10_arr).sum()),
        seed=seed,
        certified=certified,
    )


class ComparisonRow(NamedTuple):
    t: float           # hours
    simulated: float   # cells/ml, linearly interpolated from the trajectory
    observed: float    # cells/ml
    log10_ratio: float # log10(simulated/observed)


def compare_experiment(traj: Trajectory,
                       data: list[tuple[float, float]]) -> list[ComparisonRow]:
    """Align observed counts with a simulated trajectory.

    Ratios are log10 rather than absolute: populations span several
    decades and counting-chamber data is only order-of-magnitude
    trustworthy at the extremes.
    """
    if len(traj) == 0:
        raise ValidationError("trajectory is empty")
    if not data:
        raise ValidationError("no observations to compare")
    t_lo, t_hi = float(traj.t[0]), float(traj.t[-1])
    rows: list[ComparisonRow] = []
    for t, count in data:
        if not t_lo <= t <= t_hi:
            raise ValidationError(
                f"observation at t={t} h lies outside the simulated span "
                f"[{t_lo}, {t_hi}] h")
        if count <= 0:
            raise ValidationError(f"counts must be positive, got {count} at t={t} h")
        sim_y = float(np.interp(t, traj.t, traj.x1))
        ratio = math.log10(sim_y / count) if sim_y > 0 else -math.inf
        rows.append(ComparisonRow(t, sim_y, count, ratio))
    return rows
