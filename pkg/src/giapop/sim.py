"""Fixed-step closed-loop engine and inequality checkers.

Couples plant, norm observer, and dose law into one 3-state system
(x1, x2, x2_hat), integrates it with classical RK4, records strided
samples, and checks the certified inequalities on the records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from .control import (AdaptiveConfig, ControllerConfig, adaptive_dose,
                      constant_dose, min_eta, scheduled_dose,
                      validate_adaptive)
from .errors import NumericError, ValidationError
from .model import ModelParams, PlantState, growth_rate, vector_field
from .observer import ObserverParams, ObserverState, observer_derivative, \
    pi_bound, validate_gains

PROFILES = ("paper", "theorem")


@dataclass(frozen=True)
class SimConfig:
    """Run geometry, initial conditions, and validation profile.

    profile "paper" keeps the configured dosing margin eta even when it
    sits below the theorem floor (a warning is recorded); profile
    "theorem" raises eta to at least min_eta so the decay envelope is
    actually guaranteed, not just observed.
    """

    t_end: float = 60.0        # hours
    dt: float = 0.01           # hours per step
    record_stride: int = 1     # steps per stored sample
    x1_0: float = 1e5          # cells/ml
    x2_0: float = 4.80         # dimensionless
    x2_hat_0: float = 11.25    # dimensionless
    profile: str = "paper"
    x2_0_bound: float | None = None  # assumed bound on |x2(0)|; default |x2_0|

    def __post_init__(self) -> None:
        if not (0 < self.dt <= self.t_end):
            raise ValidationError(f"need 0 < dt <= t_end, got dt={self.dt}, t_end={self.t_end}")
        n = round(self.t_end / self.dt)
        if n < 1 or abs(n * self.dt - self.t_end) > 1e-9 * max(self.t_end, 1.0):
            raise ValidationError(
                f"t_end={self.t_end} is not an integer multiple of dt={self.dt}")
        if self.record_stride < 1 or int(self.record_stride) != self.record_stride:
            raise ValidationError(f"record_stride must be a positive integer, got {self.record_stride}")
        if n % self.record_stride != 0:
            raise ValidationError(
                f"step count {n} is not divisible by record_stride {self.record_stride}")
        if self.x1_0 < 0:
            raise ValidationError(f"x1(0) must be nonnegative, got {self.x1_0}")
        if self.x2_hat_0 < 0:
            raise ValidationError(f"x2_hat(0) must be nonnegative, got {self.x2_hat_0}")
        if self.profile not in PROFILES:
            raise ValidationError(f"unknown profile {self.profile!r}; expected one of {PROFILES}")
        if self.x2_0_bound is not None and self.x2_0_bound < 0:
            raise ValidationError("x2_0_bound must be nonnegative")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)

    @property
    def mutation_bound_0(self) -> float:
        """Assumed bound on |x2(0)| used for pi(t) and the eta floor."""
        return abs(self.x2_0) if self.x2_0_bound is None else self.x2_0_bound


class TrajectoryRecord(NamedTuple):
    t: float        # hours
    x1: float       # cells/ml
    x2: float       # dimensionless
    x2_hat: float   # dimensionless
    u: float        # ug/ml
    r: float        # 1/hour
    envelope: float # x1(0)*exp(-delta*t), nan when no decay claim applies
    pi: float       # decaying observer slack


@dataclass
class Trajectory:
    """Strided samples of one run plus the metadata the checkers need."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    x2_hat: np.ndarray
    u: np.ndarray
    r: np.ndarray
    envelope: np.ndarray
    pi: np.ndarray
    strategy: str = "unknown"
    profile: str | None = None
    delta: float | None = None        # envelope decay rate, if claimed
    lam: float | None = None          # observer pole used
    x2_0_bound: float | None = None
    x2_hat_0: float | None = None
    clamp_events: int = 0
    warnings: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.t)

    def record(self, i: int) -> TrajectoryRecord:
        return TrajectoryRecord(
            float(self.t[i]), float(self.x1[i]), float(self.x2[i]),
            float(self.x2_hat[i]), float(self.u[i]), float(self.r[i]),
            float(self.envelope[i]), float(self.pi[i]))

    def __iter__(self):
        return (self.record(i) for i in range(len(self)))


Dynamics = Callable[[float, tuple[float, ...]], tuple[float, ...]]


def rk4_step(state: tuple[float, ...], t: float, dt: float,
             dynamics: Dynamics) -> tuple[float, ...]:
    """One classical 4th-order Runge-Kutta update of a float-tuple state."""
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    k1 = dynamics(t, state)
    s2 = tuple(x + 0.5 * dt * k for x, k in zip(state, k1))
    k2 = dynamics(t + 0.5 * dt, s2)
    s3 = tuple(x + 0.5 * dt * k for x, k in zip(state, k2))
    k3 = dynamics(t + 0.5 * dt, s3)
    s4 = tuple(x + dt * k for x, k in zip(state, k3))
    k4 = dynamics(t + dt, s4)
    out = tuple(x + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d)
                for x, a, b, c, d in zip(state, k1, k2, k3, k4))
    for v in out:
        if not math.isfinite(v):
            raise NumericError(f"non-finite state after step starting at t={t:g} h")
    return out


def _resolve_adaptive(c: ControllerConfig, p: ModelParams, sc: SimConfig,
                      enforce_design: bool) -> tuple[AdaptiveConfig, list[str]]:
    """Apply the profile to the adaptive bounds; returns effective config."""
    warnings: list[str] = []
    x2b = sc.mutation_bound_0
    xh0 = abs(sc.x2_hat_0)
    report = validate_adaptive(c.adaptive, p, x2b, xh0)
    design_failures = [chk for chk in report.failed() if chk.name != "eta"]
    if design_failures:
        msgs = [f"designer bound {chk.name}={chk.value:.6g} does not dominate "
                f"the plant (threshold {chk.threshold:.6g})" for chk in design_failures]
        if enforce_design:
            raise ValidationError("; ".join(msgs))
        warnings.extend(msgs)

    eff = c.adaptive
    eta_needed = min_eta(eff.beta_m_bar, x2b, xh0, eff.delta)
    if sc.profile == "theorem":
        if eff.eta < eta_needed:
            warnings.append(
                f"eta raised from {eff.eta:.6g} to {eta_needed:.6g} to meet the "
                f"decay-guarantee floor (theorem profile)")
            eff = replace(eff, eta=eta_needed)
    elif eff.eta < eta_needed:
        warnings.append(
            f"eta={eff.eta:.6g} is below the decay-guarantee floor {eta_needed:.6g}; "
            f"the rate-{eff.delta:g} envelope is not certified for this run "
            f"(paper profile)")
    return eff, warnings


def simulate(p: ModelParams, o: ObserverParams, c: ControllerConfig,
             sc: SimConfig, *, strict_gains: bool = False,
             enforce_design: bool = True) -> Trajectory:
    """Integrate the coupled plant + observer under one dose strategy.

    The dose is re-evaluated inside every RK4 stage from that stage's own
    (y, x2_hat) for the adaptive law and from the stage time for
    schedules: the laws are static feedback, not held samples. Tiny
    negative population excursions (roundoff while decaying to zero) are
    clamped to 0 and counted; anything below -1e-9*K aborts.
    """
    warnings: list[str] = []

    if sc.x1_0 > p.K:
        raise ValidationError(
            f"x1(0)={sc.x1_0:g} exceeds the carrying capacity K={p.K:g}")

    gains = validate_gains(p, o)
    if not gains.all_ok:
        if strict_gains:
            raise ValidationError("; ".join(gains.messages()))
        warnings.extend(m + " (advisory)" for m in gains.messages())

    # ------------------------------------------------------------------
    # dose law closure: u(t, y, x2_hat) in ug/ml
    # ------------------------------------------------------------------
    if c.strategy == "zero":
        dose = lambda t, y, xh: 0.0
    elif c.strategy == "constant":
        u_const = constant_dose(p, c.delta)
        dose = lambda t, y, xh: u_const
    elif c.strategy == "adaptive":
        eff, w = _resolve_adaptive(c, p, sc, enforce_design)
        warnings.extend(w)
        dose = lambda t, y, xh: adaptive_dose(eff, y, xh)
    else:  # schedule
        for start, _ in c.schedule.segments:
            k = start / sc.dt
            if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
                raise ValidationError(
                    f"schedule start {start} h is not aligned to dt={sc.dt} h")
        dose = lambda t, y, xh: scheduled_dose(c.schedule, t)

    def dyn(t: float, state: tuple[float, ...]) -> tuple[float, float, float]:
        x1, x2, xh = state
        u = dose(t, x1, xh)
        d = vector_field(p, PlantState(x1, x2), u)
        dh = observer_derivative(o, ObserverState(xh), x1)
        return (d.dx1, d.dx2, dh)

    # ------------------------------------------------------------------
    # integrate and record
    # ------------------------------------------------------------------
    n = sc.n_steps
    stride = sc.record_stride
    n_rec = n // stride + 1
    cols = {name: np.empty(n_rec) for name in
            ("t", "x1", "x2", "x2_hat", "u", "r", "envelope", "pi")}

    delta_env = c.envelope_delta
    y0 = sc.x1_0
    x2b = sc.mutation_bound_0
    xh0 = abs(sc.x2_hat_0)
    eps = 1e-9 * p.K

    def record(k: int, t: float, state: tuple[float, float, float]) -> None:
        x1, x2, xh = state
        u = dose(t, x1, xh)
        cols["t"][k] = t
        cols["x1"][k] = x1
        cols["x2"][k] = x2
        cols["x2_hat"][k] = xh
        cols["u"][k] = u
        cols["r"][k] = growth_rate(p, PlantState(x1, x2), u)
        cols["envelope"][k] = (y0 * math.exp(-delta_env * t)
                               if delta_env is not None else math.nan)
        cols["pi"][k] = pi_bound(o.lam, x2b, xh0, t)

    state = (sc.x1_0, sc.x2_0, sc.x2_hat_0)
    record(0, 0.0, state)
    clamp_events = 0
    for i in range(n):
        state = rk4_step(state, i * sc.dt, sc.dt, dyn)
        x1, x2, xh = state
        if x1 < 0.0:
            if x1 > -eps:
                state = (0.0, x2, xh)
                clamp_events += 1
            else:
                raise NumericError(
                    f"population fell to {x1:g} (below -1e-9*K) at t={(i + 1) * sc.dt:g} h")
        if (i + 1) % stride == 0:
            record((i + 1) // stride, (i + 1) * sc.dt, state)

    return Trajectory(
        **cols, strategy=c.strategy, profile=sc.profile, delta=delta_env,
        lam=o.lam, x2_0_bound=x2b, x2_hat_0=xh0,
        clamp_events=clamp_events, warnings=tuple(warnings))


def check_envelope(traj: Trajectory, y0: float, delta: float,
                   tol: float = 1e-6) -> list[tuple[float, float, float]]:
    """Samples violating y(t) <= y0*exp(-delta*t), as (t, y, bound) rows."""
    if len(traj) == 0:
        raise ValidationError("trajectory is empty")
    if y0 < 0 or delta <= 0:
        raise ValidationError("need y0 >= 0 and delta > 0")
    bound = y0 * np.exp(-delta * traj.t)
    bad = np.flatnonzero(traj.x1 > bound * (1.0 + tol))
    return [(float(traj.t[i]), float(traj.x1[i]), float(bound[i])) for i in bad]


def check_observer_bound(traj: Trajectory, lam: float,
                         ics: tuple[float, float],
                         tol: float = 1e-6) -> list[tuple[float, float, float]]:
    """Samples violating |x2(t)| <= |x2_hat(t)| + pi(t), as (t, |x2|, bound) rows.

    ics is (assumed |x2(0)| bound, |x2_hat(0)|). The checker only
    reports; it does not presume the gains were valid.
    """
    if len(traj) == 0:
        raise ValidationError("trajectory is empty")
    x2b, xh0 = ics
    if x2b < 0 or xh0 < 0:
        raise ValidationError("initial-condition magnitudes must be nonnegative")
    bound = np.abs(traj.x2_hat) + np.exp(-lam * traj.t) * (x2b + xh0)
    bad = np.flatnonzero(np.abs(traj.x2) > bound * (1.0 + tol))
    return [(float(traj.t[i]), float(abs(traj.x2[i])), float(bound[i])) for i in bad]
