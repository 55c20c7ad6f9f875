"""Reward terms for learning periodic bipedal locomotion.

A smooth phase clock assigns each leg a stance likelihood C in (0, 1); the
terms score foot velocity/force against the clock, contact correctness, and
tracking of the reference joints.  All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FORCE_CONTACT_THRESHOLD = 5.0   # N; strictly-greater comparison
VEL_SCALE = 1.25                # m/s normalization of stance-foot slip
FORCE_SCALE = 50.0              # N normalization of swing-foot load
CS_GAIN = 1.3
TRACK_GAIN = 2.0
CLOCK_GAIN = 10.0


@dataclass(frozen=True)
class PhaseConfig:
    """Gait-cycle clock: frequency, stance ratio and per-leg offsets."""

    f_c: float
    r_st: float = 0.5
    offsets: tuple[float, ...] = (0.0, 0.5)

    def __post_init__(self):
        if not (math.isfinite(self.f_c) and self.f_c > 0):
            raise ValueError(f"f_c must be positive, got {self.f_c!r}")
        if not 0.0 < self.r_st < 1.0:
            raise ValueError(f"r_st must lie in (0, 1), got {self.r_st!r}")
        if any(not 0.0 <= o < 1.0 for o in self.offsets):
            raise ValueError("phase offsets must lie in [0, 1)")

    @property
    def n_leg(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class FootState:
    """Ground reaction force (3-vector, N) and horizontal velocity (m/s)."""

    force: tuple[float, float, float]
    vel_xy: tuple[float, float]

    def __post_init__(self):
        if len(self.force) != 3 or len(self.vel_xy) != 2:
            raise ValueError("force must be a 3-vector, vel_xy a 2-vector")
        vals = (*self.force, *self.vel_xy)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("foot state must be finite")

    @property
    def force_norm(self) -> float:
        return math.sqrt(sum(f * f for f in self.force))

    @property
    def vel_norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.vel_xy))


@dataclass(frozen=True)
class TrackPair:
    q_des: np.ndarray
    q_actual: np.ndarray

    def __post_init__(self):
        qd = np.asarray(self.q_des, dtype=float)
        qa = np.asarray(self.q_actual, dtype=float)
        if qd.shape != qa.shape:
            raise ValueError(f"shape mismatch: {qd.shape} vs {qa.shape}")
        object.__setattr__(self, "q_des", qd)
        object.__setattr__(self, "q_actual", qa)


def _sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def _warp(tau: float, r_st: float) -> float:
    if tau <= r_st:
        return 0.5 * tau / r_st
    return 0.5 + 0.5 * (tau - r_st) / (1.0 - r_st)


def phase_c(t: float, leg: int, cfg: PhaseConfig) -> float:
    """Stance-likelihood clock C in (0, 1) for one leg at time t."""
    tau = (cfg.f_c * t + cfg.offsets[leg]) % 1.0
    tau_prime = _warp(tau, cfg.r_st)
    return _sigmoid(CLOCK_GAIN * math.sin(2.0 * math.pi * tau_prime))


def contact_s(foot: FootState) -> int:
    """Binary contact indicator: 1 iff the force norm strictly exceeds 5 N."""
    return 1 if foot.force_norm > FORCE_CONTACT_THRESHOLD else 0


def reward_vf(feet: list[FootState], c: list[float]) -> float:
    """Velocity/force phase term: stance-phase foot slip and swing-phase
    foot load both raise it (a penalty magnitude; weight it negatively)."""
    if len(feet) != len(c):
        raise ValueError(f"expected {len(c)} feet, got {len(feet)}")
    total = 0.0
    for foot, ci in zip(feet, c):
        total += ci * (1.0 - math.exp(-foot.vel_norm / VEL_SCALE))
        total += (1.0 - ci) * (1.0 - math.exp(-foot.force_norm / FORCE_SCALE))
    return total


def reward_cs(feet: list[FootState], c: list[float]) -> float:
    """Contact-schedule term: +1 per leg in the commanded phase, down to
    -0.3 per leg fully out of phase."""
    if len(feet) != len(c):
        raise ValueError(f"expected {len(c)} feet, got {len(feet)}")
    total = 0.0
    for foot, ci in zip(feet, c):
        si = contact_s(foot)
        total += 1.0 + CS_GAIN * (2.0 * ci * si - ci - si)
    return total


def reward_track(pair: TrackPair) -> float:
    """Joint-tracking term in (0, 1]: exp(-2 ||q_des - q_actual||)."""
    err = float(np.linalg.norm(pair.q_des - pair.q_actual))
    return math.exp(-TRACK_GAIN * err)


DEFAULT_WEIGHTS = (-1.0, 1.0, 1.0)


def composite(t: float, feet: list[FootState], pair: TrackPair,
              cfg: PhaseConfig,
              weights: tuple[float, float, float] = DEFAULT_WEIGHTS) -> dict:
    """Per-term breakdown plus the weighted total.

    The velocity/force term measures misbehavior, so its default weight is
    negative; the source composition never fixes the weights, making them
    configuration here.
    """
    c = [phase_c(t, leg, cfg) for leg in range(cfg.n_leg)]
    r_vf = reward_vf(feet, c)
    r_cs = reward_cs(feet, c)
    r_tr = reward_track(pair)
    total = weights[0] * r_vf + weights[1] * r_cs + weights[2] * r_tr
    return {"r_vf": r_vf, "r_cs": r_cs, "r_track": r_tr, "total": total}
