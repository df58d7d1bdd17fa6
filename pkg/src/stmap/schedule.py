"""Interpolation schedules on [0, 1] and the noise-mixing scalar.

A schedule is the pair of weights ``(sigma_t, beta_t)`` with
``beta_t = 1 - sigma_t``, ``sigma_0 = 1``, ``sigma_1 = 0`` and
``sigma_t`` strictly decreasing. ``beta`` is always computed as
``1 - sigma`` so the sum constraint is exact in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from .errors import ConfigError

LINEAR = "linear"
COSINE2 = "cosine2"
EXPONENTIAL = "exp"
CUSTOM = "custom"

BUILTIN_SCHEDULES = (LINEAR, COSINE2, EXPONENTIAL)

# The exponential schedule's derivative blows up as t -> 1; direct queries
# are clamped here and the t == 1 values are defined by continuity.
_EXP_CLAMP = 1.0 - 1e-9


class ScheduleValues(NamedTuple):
    sigma: float
    beta: float
    sigma_prime: float
    beta_prime: float


@dataclass(frozen=True)
class Schedule:
    """Time schedule; immutable and safe to share across threads.

    Built-in kinds: "linear" (sigma = 1 - t), "cosine2" (sigma = cos^2(pi t/2))
    and "exp" (sigma = exp(-t/(1-t))). A "custom" schedule supplies the four
    scalar functions explicitly; no automatic differentiation is attempted.
    """

    kind: str
    sigma_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)
    beta_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)
    sigma_prime_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)
    beta_prime_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in BUILTIN_SCHEDULES + (CUSTOM,):
            raise ConfigError(f"unknown schedule kind {self.kind!r}")
        if self.kind == CUSTOM:
            missing = [
                name
                for name, fn in (
                    ("sigma", self.sigma_fn),
                    ("beta", self.beta_fn),
                    ("sigma_prime", self.sigma_prime_fn),
                    ("beta_prime", self.beta_prime_fn),
                )
                if fn is None
            ]
            if missing:
                raise ConfigError(f"custom schedule must supply {', '.join(missing)}")

    @staticmethod
    def from_name(name: str) -> "Schedule":
        if name not in BUILTIN_SCHEDULES:
            raise ConfigError(
                f"unknown schedule {name!r}; expected one of {BUILTIN_SCHEDULES}"
            )
        return Schedule(kind=name)

    def __call__(self, t: float) -> ScheduleValues:
        return evaluate(self, t)


@dataclass(frozen=True)
class NoiseConfig:
    """Noise intensities: Brownian epsilon, initial-Gaussian gamma, and the
    auxiliary-Gaussian precision lam.

    gamma may be zero only when the initial law is a point mass (the
    mixing scalar then reduces to epsilon * beta_t); a Gaussian initial
    requires gamma > 0.
    """

    epsilon: float = 1.0
    gamma: float = 2.0
    lam: float = 1.0

    def __post_init__(self):
        problems = []
        if not self.epsilon >= 0:
            problems.append(f"epsilon must be >= 0, got {self.epsilon}")
        if not self.gamma >= 0:
            problems.append(f"gamma must be > 0 (or 0 for a dirac initial), got {self.gamma}")
        if not self.lam > 0:
            problems.append(f"lambda must be > 0, got {self.lam}")
        if problems:
            raise ConfigError(problems)


def evaluate(schedule: Schedule, t: float) -> ScheduleValues:
    """Evaluate (sigma, beta, sigma', beta') at time t in [0, 1].

    Pure: identical inputs give bit-identical outputs. beta is computed as
    1 - sigma. For built-in kinds beta' is -sigma' exactly.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    kind = schedule.kind
    if kind == LINEAR:
        sigma = 1.0 - t
        return ScheduleValues(sigma, 1.0 - sigma, -1.0, 1.0)
    if kind == COSINE2:
        c = math.cos(math.pi * t / 2.0)
        sigma = c * c
        sp = -(math.pi / 2.0) * math.sin(math.pi * t)
        return ScheduleValues(sigma, 1.0 - sigma, sp, -sp)
    if kind == EXPONENTIAL:
        if t >= 1.0:
            return ScheduleValues(0.0, 1.0, 0.0, 0.0)
        tc = min(t, _EXP_CLAMP)
        u = 1.0 - tc
        sigma = math.exp(-tc / u)
        sp = -sigma / (u * u)
        return ScheduleValues(sigma, 1.0 - sigma, sp, -sp)
    # custom
    sigma = float(schedule.sigma_fn(t))
    return ScheduleValues(
        sigma,
        1.0 - sigma,
        float(schedule.sigma_prime_fn(t)),
        float(schedule.beta_prime_fn(t)),
    )


def ell(schedule: Schedule, noise: NoiseConfig, t: float) -> float:
    """Noise-mixing scalar epsilon * beta_t + gamma * sigma_t."""
    vals = evaluate(schedule, t)
    return noise.epsilon * vals.beta + noise.gamma * vals.sigma


@dataclass(frozen=True)
class ScheduleViolation:
    check: str
    t: float
    detail: str

    def __str__(self):
        return f"schedule violation [{self.check}] at t={self.t:.6g}: {self.detail}"


def validate(
    schedule: Schedule,
    grid_points: int = 1000,
    fd_step: float = 1e-6,
    fd_tol: float = 1e-6,
) -> Optional[ScheduleViolation]:
    """Check all schedule invariants on a uniform grid.

    Returns None when everything holds, otherwise the first violation with
    the offending time and values. Never raises for a bad schedule.
    """
    v0 = evaluate(schedule, 0.0)
    if abs(v0.sigma - 1.0) > 1e-12 or abs(v0.beta) > 1e-12:
        return ScheduleViolation(
            "boundary", 0.0, f"sigma_0 != 1 (sigma={v0.sigma}, beta={v0.beta})"
        )
    v1 = evaluate(schedule, 1.0)
    if abs(v1.sigma) > 1e-12 or abs(v1.beta - 1.0) > 1e-12:
        return ScheduleViolation(
            "boundary", 1.0, f"sigma_1 != 0 (sigma={v1.sigma}, beta={v1.beta})"
        )

    for k in range(grid_points + 1):
        t = k / grid_points
        vals = evaluate(schedule, t)
        if abs(vals.sigma + vals.beta - 1.0) > 1e-12:
            return ScheduleViolation(
                "sum", t, f"sigma + beta = {vals.sigma + vals.beta} != 1"
            )
        if schedule.kind == CUSTOM:
            supplied_beta = float(schedule.beta_fn(t))
            if abs(supplied_beta - (1.0 - vals.sigma)) > 1e-12:
                return ScheduleViolation(
                    "beta", t, f"supplied beta {supplied_beta} != 1 - sigma"
                )
        if 0.0 < t < 1.0:
            if not vals.sigma_prime < 0.0:
                return ScheduleViolation(
                    "sigma' sign", t, f"sigma' = {vals.sigma_prime} is not < 0"
                )
            if not vals.beta_prime > 0.0:
                return ScheduleViolation(
                    "beta' sign", t, f"beta' = {vals.beta_prime} is not > 0"
                )

    # centered finite differences over [0.01, 0.99]
    n_fd = 99
    for k in range(n_fd):
        t = 0.01 + k * (0.98 / (n_fd - 1))
        vals = evaluate(schedule, t)
        sig_hi = evaluate(schedule, t + fd_step).sigma
        sig_lo = evaluate(schedule, t - fd_step).sigma
        fd_sigma = (sig_hi - sig_lo) / (2.0 * fd_step)
        if abs(fd_sigma - vals.sigma_prime) > fd_tol:
            return ScheduleViolation(
                "sigma' fd",
                t,
                f"sigma' = {vals.sigma_prime} vs centered difference {fd_sigma}",
            )
        beta_hi = evaluate(schedule, t + fd_step).beta
        beta_lo = evaluate(schedule, t - fd_step).beta
        fd_beta = (beta_hi - beta_lo) / (2.0 * fd_step)
        if abs(fd_beta - vals.beta_prime) > fd_tol:
            return ScheduleViolation(
                "beta' fd",
                t,
                f"beta' = {vals.beta_prime} vs centered difference {fd_beta}",
            )
    return None
