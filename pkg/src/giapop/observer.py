"""Norm observer for the unmeasured resistance level.

The observer is a first-order linear filter driven by the measured
population magnitude:

    d/dt x2_hat = -lam * x2_hat + gamma * |y|

For gains inside the validity intervals (lam strictly inside
(0, sigma^2*beta_m), gamma strictly above sigma^2*beta_m*sqrt(w_m) /
(K*sqrt(2))), the filter state plus a decaying initial-condition slack
pi(t) upper-bounds |x2(t)| along every plant trajectory:

    |x2(t)| <= x2_hat(t) + pi(t),   pi(t) = exp(-lam*t) * (|x2(0)| + |x2_hat(0)|)

The bound requires only magnitudes of the initial conditions, which is
what makes it usable when x2 itself cannot be measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ValidationError
from .model import ModelParams


@dataclass(frozen=True)
class ObserverParams:
    """Filter gains.

    Validity relative to a ModelParams is deliberately not enforced at
    construction: the true plant parameters are uncertain, so a user may
    set gains from interval bounds rather than nominal values. Use
    validate_gains for the nominal-value diagnostic.
    """

    lam: float    # filter pole, 1/hour
    gamma: float  # input gain, 1/(cells/ml * hour)


class ObserverState(NamedTuple):
    x2_hat: float  # estimate magnitude, dimensionless (>= 0 when started >= 0)


@dataclass(frozen=True)
class GainReport:
    """Outcome of validate_gains: per-condition result plus thresholds."""

    lam_high: float        # open upper end for lam: sigma^2*beta_m
    gamma_low: float       # open lower end for gamma
    lam_ok: bool
    gamma_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.lam_ok and self.gamma_ok

    def messages(self) -> list[str]:
        out = []
        if not self.lam_ok:
            out.append(
                f"observer pole lam must lie strictly inside (0, {self.lam_high:.6g})")
        if not self.gamma_ok:
            out.append(
                f"observer gain gamma must exceed {self.gamma_low:.6g} strictly")
        return out


def validate_gains(p: ModelParams, o: ObserverParams) -> GainReport:
    """Check the gain intervals against a nominal parameter set.

    Args:
        p: nominal plant parameters.
        o: filter gains to check.

    Returns:
        GainReport with the computed interval endpoints and a strict
        pass/fail per gain. Never raises: the caller decides whether a
        failure is advisory or fatal.
    """
    lam_high = p.resistance_decay_rate
    gamma_low = p.resistance_decay_rate * math.sqrt(p.w_m) / (p.K * math.sqrt(2.0))
    return GainReport(
        lam_high=lam_high,
        gamma_low=gamma_low,
        lam_ok=0.0 < o.lam < lam_high,
        gamma_ok=o.gamma > gamma_low,
    )


def observer_derivative(o: ObserverParams, s_hat: ObserverState, y: float) -> float:
    """Filter derivative: -lam*x2_hat + gamma*|y| (1/hour)."""
    return -o.lam * s_hat.x2_hat + o.gamma * abs(y)


def pi_bound(lam: float, x2_0_abs: float, x2_hat_0_abs: float, t: float) -> float:
    """Decaying initial-condition slack pi(t).

    Args:
        lam: filter pole (1/hour).
        x2_0_abs: assumed bound on |x2(0)|.
        x2_hat_0_abs: |x2_hat(0)|.
        t: time in hours, >= 0.

    Returns:
        exp(-lam*t) * (x2_0_abs + x2_hat_0_abs). Underflows cleanly to
        0.0 for large t.

    Raises:
        ValidationError: nonpositive pole, negative t, or negative
            magnitudes.
    """
    if lam <= 0:
        raise ValidationError(f"filter pole must be positive, got {lam}")
    if t < 0:
        raise ValidationError(f"time must be nonnegative, got {t}")
    if x2_0_abs < 0 or x2_hat_0_abs < 0:
        raise ValidationError("initial-condition magnitudes must be nonnegative")
    return math.exp(-lam * t) * (x2_0_abs + x2_hat_0_abs)


def certified_bound(s_hat: ObserverState, pi: float) -> float:
    """Certified upper bound on |x2|: |x2_hat| + pi."""
    if pi < 0:
        raise ValidationError(f"pi must be nonnegative, got {pi}")
    return abs(s_hat.x2_hat) + pi
