"""Dose-computation strategies and designer-bound validation.

Doses are ug/ml internally; uM appears only at I/O boundaries, with the
fixed conversion 1 ug/ml = 5.8425 uM.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, fields
from typing import NamedTuple

from .errors import ValidationError
from .model import ModelParams

log = logging.getLogger(__name__)

UM_PER_UGML = 5.8425  # micromolar per ug/ml, fixed conversion factor

STRATEGIES = ("zero", "constant", "adaptive", "schedule")


@dataclass(frozen=True)
class AdaptiveConfig:
    """Designer bounds for the adaptive output-feedback dose law.

    Validity against the true plant (r0_bar > r0/K, beta_m_bar > beta_m,
    beta_d_low < beta_d, eta above the theorem floor) is checked by
    validate_adaptive, not at construction: the true values are assumed
    uncertain.
    """

    r0_bar: float      # upper bound on r0/K, 1/(cells/ml * hour)
    beta_m_bar: float  # upper bound on beta_m, 1/hour
    beta_d_low: float  # lower bound on beta_d, per (ug/ml)/hour
    eta: float         # dosing margin, 1/hour
    delta: float       # target output decay rate, 1/hour

    def __post_init__(self) -> None:
        bad = [f.name for f in fields(self)
               if not (math.isfinite(getattr(self, f.name)) and getattr(self, f.name) > 0)]
        if bad:
            raise ValidationError(
                "adaptive controller bounds must be positive and finite; "
                "violated by: " + ", ".join(bad))


@dataclass(frozen=True)
class DoseSchedule:
    """Piecewise-constant dose segments, right-continuous in time.

    Each segment is (start_hours, dose_uM); the last segment holds to
    the end of the run.
    """

    segments: tuple[tuple[float, float], ...]
    um_per_ugml: float = UM_PER_UGML

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValidationError("schedule needs at least one segment")
        starts = [s for s, _ in self.segments]
        if starts[0] != 0.0:
            raise ValidationError(f"first segment must start at 0 h, got {starts[0]}")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValidationError("segment starts must be strictly increasing")
        if any(d < 0 for _, d in self.segments):
            raise ValidationError("doses must be nonnegative")
        if self.um_per_ugml <= 0:
            raise ValidationError("unit conversion factor must be positive")


class AdaptiveCheck(NamedTuple):
    name: str        # which designer bound
    value: float     # configured value
    threshold: float # what it must beat
    ok: bool


@dataclass(frozen=True)
class AdaptiveReport:
    """Per-condition outcome of validate_adaptive."""

    checks: tuple[AdaptiveCheck, ...]

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list[AdaptiveCheck]:
        return [c for c in self.checks if not c.ok]

    def messages(self) -> list[str]:
        return [
            f"designer bound {c.name}={c.value:.6g} fails its condition "
            f"(threshold {c.threshold:.6g})"
            for c in self.failed()
        ]


def adaptive_dose(c: AdaptiveConfig, y: float, x2_hat: float) -> float:
    """Output-feedback dose (ug/ml): (r0_bar*|y| + beta_m_bar*|x2_hat| + eta)/beta_d_low.

    Strictly positive for all inputs: the floor is eta/beta_d_low.
    """
    return (c.r0_bar * abs(y) + c.beta_m_bar * abs(x2_hat) + c.eta) / c.beta_d_low


def constant_dose(p: ModelParams, delta: float) -> float:
    """Known-parameter constant dose (ug/ml) enforcing decay rate delta.

    (r0 + beta_m*sqrt(w_m/2) + delta)/beta_d: the growth rate is bounded
    above by r0 + beta_m*sqrt(w_m/2) over all states, so this dose drives
    it at or below -delta everywhere.
    """
    if delta <= 0:
        raise ValidationError(f"decay rate delta must be positive, got {delta}")
    return (p.r0 + p.beta_m * math.sqrt(p.w_m / 2.0) + delta) / p.beta_d


def scheduled_dose(s: DoseSchedule, t: float) -> float:
    """Dose (ug/ml) of the active segment at time t (hours)."""
    if t < 0:
        raise ValidationError(f"time must be nonnegative, got {t}")
    # (t, inf) sorts after every (start, dose) with start <= t, so the
    # index just before the insertion point is the active segment.
    idx = bisect_right(s.segments, (t, math.inf)) - 1
    return s.segments[idx][1] / s.um_per_ugml


def min_eta(beta_m_bar: float, x2_0_abs: float, x2_hat_0_abs: float,
            delta: float) -> float:
    """Smallest margin eta with the decay guarantee: beta_m_bar*(|x2(0)|+|x2_hat(0)|)+delta."""
    if x2_0_abs < 0 or x2_hat_0_abs < 0 or beta_m_bar < 0:
        raise ValidationError("magnitudes must be nonnegative")
    if delta <= 0:
        raise ValidationError(f"decay rate delta must be positive, got {delta}")
    return beta_m_bar * x2_0_abs + beta_m_bar * x2_hat_0_abs + delta


def validate_adaptive(c: AdaptiveConfig, p: ModelParams, x2_0_abs: float,
                      x2_hat_0_abs: float) -> AdaptiveReport:
    """Check every designer bound against nominal plant values and ICs.

    The eta threshold is the full decay-guarantee floor min_eta (it
    includes delta): an eta below it cannot certify the claimed rate.
    Published parameter sets can fail here; the report is advisory and
    the simulation profile decides what to do with failures.
    """
    eta_floor = min_eta(c.beta_m_bar, x2_0_abs, x2_hat_0_abs, c.delta)
    return AdaptiveReport(checks=(
        AdaptiveCheck("r0_bar", c.r0_bar, p.r0 / p.K, c.r0_bar > p.r0 / p.K),
        AdaptiveCheck("beta_m_bar", c.beta_m_bar, p.beta_m, c.beta_m_bar > p.beta_m),
        AdaptiveCheck("beta_d_low", c.beta_d_low, p.beta_d, c.beta_d_low < p.beta_d),
        AdaptiveCheck("eta", c.eta, eta_floor, c.eta >= eta_floor),
    ))


def clamp_nonneg(u: float) -> float:
    """Clamp a dose to be nonnegative; logs when the clamp actually fires."""
    if u < 0:
        log.warning("dose %g clamped to 0 (saturation event)", u)
        return 0.0
    return u


@dataclass(frozen=True)
class ControllerConfig:
    """One dosing strategy plus whatever that strategy needs.

    strategy is a closed enumeration: zero | constant | adaptive |
    schedule. The decay target delta is read from the adaptive bounds
    for the adaptive strategy and from the delta field for the constant
    one; zero and schedule runs carry no decay claim.
    """

    strategy: str
    adaptive: AdaptiveConfig | None = None
    delta: float | None = None
    schedule: DoseSchedule | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValidationError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if (self.adaptive is not None) != (self.strategy == "adaptive"):
            raise ValidationError("adaptive bounds required iff strategy is 'adaptive'")
        if (self.schedule is not None) != (self.strategy == "schedule"):
            raise ValidationError("schedule required iff strategy is 'schedule'")
        if self.strategy == "constant":
            if self.delta is None or self.delta <= 0:
                raise ValidationError("constant strategy needs a positive delta")

    @property
    def envelope_delta(self) -> float | None:
        """Decay rate the run claims, or None when no claim applies."""
        if self.strategy == "adaptive":
            return self.adaptive.delta
        if self.strategy == "constant":
            return self.delta
        return None
