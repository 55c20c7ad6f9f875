"""Map the planar model trajectories onto the 12-joint humanoid.

Joint order (pitch then roll then yaw):
L-aky, L-kny, L-hpy, R-aky, R-kny, R-hpy, L-akx, L-hpx, R-akx, R-hpx,
L-hpz, R-hpz.  Hip yaw is held at zero.  The map is linear in the model
angles; the frontal angles carry a -pi offset because the models measure
them from the downward vertical.

A full gait cycle lasts two swing periods.  The sagittal curve repeats each
half with the stance assignment flipped (the swap symmetry makes the splice
C1-continuous); the frontal motion retraces itself in the second half
(legs spread then close), which is position-continuous and periodic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bezier import BezierCurve

JOINT_NAMES = (
    "q_L-aky", "q_L-kny", "q_L-hpy",
    "q_R-aky", "q_R-kny", "q_R-hpy",
    "q_L-akx", "q_L-hpx", "q_R-akx", "q_R-hpx",
    "q_L-hpz", "q_R-hpz",
)

# pitch rows (right stance): joints x model angles (q^x_1..q^x_5)
_PITCH_RIGHT = np.array([
    [0, 0, -1, -1, 0],   # L-aky = -q3 - q4   (left leg swings)
    [0, 0, 0, -1, 0],    # L-kny = -q4
    [0, 0, 1, 0, 1],     # L-hpy = q3 + q5
    [-1, -1, 0, 0, 0],   # R-aky = -q1 - q2   (right leg is stance)
    [-1, 0, 0, 0, 0],    # R-kny = -q1
    [0, 1, 0, 0, 1],     # R-hpy = q2 + q5
], dtype=float)

# roll rows (right stance): joints x model angles (q^y_1..q^y_3)
_ROLL_RIGHT = np.array([
    [1, 0, 0],    # L-akx = q1 - pi
    [1, 0, -1],   # L-hpx = q1 - q3 - pi
    [0, 1, 0],    # R-akx = q2 - pi
    [0, 1, -1],   # R-hpx = q2 - q3 - pi
], dtype=float)

_ROLL_OFFSET = np.array([-np.pi, -np.pi, -np.pi, -np.pi])

# left stance: swap the left/right output blocks
_PITCH_LEFT = _PITCH_RIGHT[[3, 4, 5, 0, 1, 2]]
_ROLL_LEFT = _ROLL_RIGHT[[2, 3, 0, 1]]


def _matrices(stance: str):
    if stance == "right":
        return _PITCH_RIGHT, _ROLL_RIGHT
    if stance == "left":
        return _PITCH_LEFT, _ROLL_LEFT
    raise ValueError(f"stance must be 'left' or 'right', got {stance!r}")


def map_config(qx, qy, stance: str = "right") -> np.ndarray:
    """12-joint vector from planar configurations.  ``stance`` names the
    physical support leg; model channels are assigned accordingly."""
    qx = np.asarray(qx.q if hasattr(qx, "q") else qx, dtype=float)
    qy = np.asarray(qy.q if hasattr(qy, "q") else qy, dtype=float)
    pitch, roll = _matrices(stance)
    out = np.empty(qx.shape[:0] + (12,) + qx.shape[1:])
    out[:6] = pitch @ qx
    out[6:10] = (roll @ qy) + (_ROLL_OFFSET if qy.ndim == 1
                               else _ROLL_OFFSET[:, None])
    out[10:12] = 0.0
    return out


def map_rates(dqx, dqy, stance: str = "right") -> np.ndarray:
    """12-joint rate vector; the linear part of the map without offsets."""
    dqx = np.asarray(dqx, dtype=float)
    dqy = np.asarray(dqy, dtype=float)
    pitch, roll = _matrices(stance)
    out = np.empty(dqx.shape[:0] + (12,) + dqx.shape[1:])
    out[:6] = pitch @ dqx
    out[6:10] = roll @ dqy
    out[10:12] = 0.0
    return out


def _other(stance: str) -> str:
    return "left" if stance == "right" else "right"


@dataclass(frozen=True)
class RobotGait:
    """Periodic 12-joint trajectory over one full gait cycle (two steps)."""

    curve_x: BezierCurve
    curve_y: BezierCurve
    t_ssp: float
    stance_first: str = "right"
    z0: float | None = None

    def __post_init__(self):
        if self.stance_first not in ("left", "right"):
            raise ValueError("stance_first must be 'left' or 'right'")
        if abs(self.curve_x.duration - self.t_ssp) > 1e-12 or \
           abs(self.curve_y.duration - self.t_ssp) > 1e-12:
            raise ValueError("curves must span exactly one swing period")

    @property
    def duration(self) -> float:
        return 2.0 * self.t_ssp

    def _split(self, t):
        t = np.asarray(t, dtype=float)
        tau = np.mod(t, self.duration)
        second = tau >= self.t_ssp
        tau_x = np.where(second, tau - self.t_ssp, tau)
        # frontal motion retraces itself in the second half
        tau_y = np.where(second, self.duration - tau, tau)
        return tau_x, tau_y, second

    def joints(self, t) -> np.ndarray:
        """Joint positions at time t (scalar or array); periodic extension."""
        tau_x, tau_y, second = self._split(t)
        qx = self.curve_x.eval(tau_x)
        qy = self.curve_y.eval(tau_y)
        first_map = map_config(qx, qy, self.stance_first)
        second_map = map_config(qx, qy, _other(self.stance_first))
        return np.where(second, second_map, first_map) if first_map.ndim > 1 \
            else (second_map if second else first_map)

    def joint_rates(self, t) -> np.ndarray:
        tau_x, tau_y, second = self._split(t)
        dqx = self.curve_x.derivative(tau_x)
        dqy = self.curve_y.derivative(tau_y)
        dqy = np.where(second, -dqy, dqy) if np.ndim(second) else \
            (-dqy if second else dqy)
        first_map = map_rates(dqx, dqy, self.stance_first)
        second_map = map_rates(dqx, dqy, _other(self.stance_first))
        return np.where(second, second_map, first_map) if first_map.ndim > 1 \
            else (second_map if second else first_map)


def assemble_gait(plan_x, plan_y, stance_first: str = "right") -> RobotGait:
    """Combine sagittal and frontal plans into one periodic robot gait."""
    if abs(plan_x.t_ssp - plan_y.t_ssp) > 1e-12:
        raise ValueError(
            f"plans disagree on the swing period: {plan_x.t_ssp} vs {plan_y.t_ssp}")
    if abs(plan_x.z_pendulum - plan_y.z_pendulum) > 1e-12:
        raise ValueError(
            f"plans disagree on the pendulum height: "
            f"{plan_x.z_pendulum} vs {plan_y.z_pendulum}")
    return RobotGait(curve_x=plan_x.curve, curve_y=plan_y.curve,
                     t_ssp=plan_x.t_ssp, stance_first=stance_first,
                     z0=plan_x.z_pendulum)


def sample(gait: RobotGait, dt: float, cycles: float = 1.0):
    """Uniform time series over ``cycles`` gait cycles, endpoints included.

    Returns (t, q, dq) with q, dq of shape (n, 12); rates come from the
    exact curve derivatives mapped through the (linear) joint map.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    span = cycles * gait.duration
    n = int(round(span / dt)) + 1
    ts = np.arange(n) * dt
    q = gait.joints(ts).T
    dq = gait.joint_rates(ts).T
    return ts, q, dq
