"""Independent validators for planned gaits.

Each planar trajectory is checked on a dense grid against the five defining
properties of a valid single-support step: boundary swap symmetry in value
and rate, zero boundary clearance, strictly positive interior clearance,
the pendulum end-rate condition, and constant CoM height.  A diagnostic
comparison against the closed-form pendulum flow quantifies how well the
multi-link CoM actually behaves like the point-mass model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bezier import BezierCurve
from .hlip import HlipParams, HlipState, ssp_flow, step_coeffs
from .kinematics import (
    SWAP_X,
    clearance_x,
    clearance_y,
    com_jacobian_x,
    com_jacobian_y,
    com_x,
    com_x_batch,
    com_y,
)
from .params import LinkParams

# strict-interior positivity: the buffer zone near the endpoints where the
# clearance may still be inside its (quadratic) liftoff
CORE_FRACTION = 0.05
CORE_MARGIN = 1e-6

TOL_BOUNDARY = 1e-9
TOL_RATE_CONDITION = 1e-6
TOL_HEIGHT = 1e-3


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    max_violation: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class VerifyReport:
    properties: tuple[PropertyCheck, ...]
    grid: int
    passed: bool
    notes: dict = field(default_factory=dict)

    def worst_violation_ratio(self) -> float:
        """Largest violation/tolerance ratio; <= 1 means everything passed."""
        return max((p.max_violation / p.tolerance for p in self.properties),
                   default=0.0)

    def by_name(self, name: str) -> PropertyCheck:
        for p in self.properties:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "passed": self.passed,
            "properties": [
                {"name": p.name, "max_violation": p.max_violation,
                 "tolerance": p.tolerance, "passed": p.passed}
                for p in self.properties
            ],
            "notes": dict(self.notes),
        }


def _check(name: str, violation: float, tol: float) -> PropertyCheck:
    violation = float(violation)
    return PropertyCheck(name, violation, tol, violation <= tol)


def _clearance_properties(gam: np.ndarray, prefix: str) -> list[PropertyCheck]:
    """Interior positivity split into a strict sign check everywhere and a
    margin check away from the endpoint liftoff zones."""
    n = len(gam)
    interior = gam[1:-1]
    lo, hi = int(CORE_FRACTION * n), int((1.0 - CORE_FRACTION) * n)
    core = gam[lo:hi]
    sign_violation = max(0.0, -float(np.min(interior)))
    margin_violation = max(0.0, CORE_MARGIN - float(np.min(core)))
    return [
        _check(f"{prefix}_interior_positive", sign_violation, 1e-9),
        _check(f"{prefix}_core_margin", margin_violation, CORE_MARGIN),
    ]


def verify_x_curve(curve: BezierCurve, lp: LinkParams, hlip: HlipParams,
                   step_length: float, z_target: float, grid: int = 1000,
                   height_tol: float = TOL_HEIGHT) -> VerifyReport:
    """Check the five sagittal step properties for a raw 5-channel curve."""
    t = curve.duration
    ctrl = curve.control
    n = curve.degree
    # Bernstein endpoint identities: values and rates depend only on the
    # outermost control columns
    q0, qt = ctrl[:, 0], ctrl[:, n]
    dq0 = (n / t) * (ctrl[:, 1] - ctrl[:, 0])
    dqt = (n / t) * (ctrl[:, n] - ctrl[:, n - 1])
    checks: list[PropertyCheck] = []
    checks.append(_check("swap_position", np.max(np.abs(q0 - SWAP_X @ qt)),
                         TOL_BOUNDARY))
    checks.append(_check("swap_rate", np.max(np.abs(dq0 - SWAP_X @ dqt)),
                         TOL_BOUNDARY))
    g0, gt_ = float(clearance_x(q0, lp)), float(clearance_x(qt, lp))
    checks.append(_check("contact_boundary", max(abs(g0), abs(gt_)),
                         TOL_BOUNDARY))
    q_grid = curve.eval_uniform(grid)
    gam = clearance_x(q_grid, lp)
    checks.extend(_clearance_properties(gam, "clearance"))
    coeffs = step_coeffs(hlip)
    x_t = float(com_x(qt, lp)[0])
    lhs = com_jacobian_x(qt, lp) @ dqt
    rhs = np.array([(step_length - coeffs.t1 * x_t) / coeffs.t2, 0.0])
    checks.append(_check("pendulum_rate_condition", np.max(np.abs(lhs - rhs)),
                         TOL_RATE_CONDITION))
    z = com_x_batch(q_grid, lp)[1]
    checks.append(_check("constant_height", np.max(np.abs(z - z_target)),
                         height_tol))
    return VerifyReport(tuple(checks), grid, all(c.passed for c in checks),
                        notes={"step_length": step_length,
                               "z_target": z_target,
                               "z_pendulum": hlip.z0})


def verify_y_curve(curve: BezierCurve, lp: LinkParams, hlip: HlipParams,
                   step_length: float, z_target: float, grid: int = 1000,
                   height_tol: float = TOL_HEIGHT) -> VerifyReport:
    """Check the five frontal step properties for a raw 3-channel curve."""
    lp.require_y()
    t = curve.duration
    ctrl = curve.control
    n = curve.degree
    q0, qt = ctrl[:, 0], ctrl[:, n]
    dqt = (n / t) * (ctrl[:, n] - ctrl[:, n - 1])
    checks: list[PropertyCheck] = []
    checks.append(_check("legs_equal_start", abs(q0[0] - q0[1]), TOL_BOUNDARY))
    checks.append(_check("legs_equal_end_rate", abs(dqt[0] - dqt[1]),
                         TOL_BOUNDARY))
    g0, gt_ = float(clearance_y(q0, lp)), float(clearance_y(qt, lp))
    checks.append(_check("contact_boundary", max(abs(g0), abs(gt_)),
                         TOL_BOUNDARY))
    q_grid = curve.eval_uniform(grid)
    from .planner import _y_trig_fields

    z, gam, _, _ = _y_trig_fields(q_grid, lp)
    checks.extend(_clearance_properties(gam, "clearance"))
    coeffs = step_coeffs(hlip)
    import math as _m

    a_c = (lp.m1 + lp.m2) * (lp.ry1 + lp.ly1) + lp.m3 * lp.ly1
    b_c = (lp.m1 + lp.m2) * lp.ry2
    e_c = lp.m3 * lp.ry3
    mt = lp.total_mass
    q1, q2, q3 = float(qt[0]), float(qt[1]), float(qt[2])
    y_t = (a_c * _m.sin(q2 - _m.pi) + b_c * _m.sin(_m.pi - q1)
           + e_c * _m.sin(q3)) / mt
    lhs_y = (-b_c * _m.cos(_m.pi - q1) * dqt[0]
             + a_c * _m.cos(q2 - _m.pi) * dqt[1]
             + e_c * _m.cos(q3) * dqt[2]) / mt
    lhs_z = (b_c * _m.sin(_m.pi - q1) * dqt[0]
             - a_c * _m.sin(q2 - _m.pi) * dqt[1]
             - e_c * _m.sin(q3) * dqt[2]) / mt
    rhs_y = (step_length - coeffs.t1 * y_t) / (2.0 * coeffs.t2)
    checks.append(_check("pendulum_rate_condition",
                         max(abs(lhs_y - rhs_y), abs(lhs_z)),
                         TOL_RATE_CONDITION))
    checks.append(_check("constant_height", np.max(np.abs(z - z_target)),
                         height_tol))
    return VerifyReport(tuple(checks), grid, all(c.passed for c in checks),
                        notes={"step_length": step_length,
                               "z_target": z_target,
                               "z_pendulum": hlip.z0})


def verify_x(plan, lp: LinkParams | None = None, hlip: HlipParams | None = None,
             grid: int = 1000) -> VerifyReport:
    """Verify a sagittal plan against its own targets."""
    lp = lp or plan.lp
    hlip = hlip or plan.hlip
    return verify_x_curve(plan.curve, lp, hlip, plan.step_length,
                          plan.z_target, grid=grid,
                          height_tol=plan.request.height_tol)


def verify_y(plan, lp: LinkParams | None = None, hlip: HlipParams | None = None,
             grid: int = 1000) -> VerifyReport:
    """Verify a frontal plan against its own targets."""
    lp = lp or plan.lp
    hlip = hlip or plan.hlip
    return verify_y_curve(plan.curve, lp, hlip, plan.step_length,
                          plan.z_target, grid=grid,
                          height_tol=plan.request.height_tol)


def hlip_consistency(curve: BezierCurve, lp: LinkParams, hlip: HlipParams,
                     model: str = "x", grid: int = 1000) -> dict:
    """Diagnostic: distance between the kinematic CoM motion along the curve
    and the closed-form pendulum flow launched from the initial CoM state.

    Reported, never asserted: the multi-link model only approximates the
    pendulum.  Returns max position and velocity deviations plus the initial
    state used.
    """
    ts = np.linspace(0.0, curve.duration, grid)
    q = curve.eval_uniform(grid)
    dq = curve.derivative_uniform(grid)
    if model == "x":
        pos = com_x_batch(q, lp)[0]
        jac = com_jacobian_x(q, lp)
    elif model == "y":
        pos = com_y(q, lp)[0]
        jac = com_jacobian_y(q, lp)
    else:
        raise ValueError("model must be 'x' or 'y'")
    vel = np.einsum("ij...,j...->i...", jac, dq)[0]
    init = HlipState(p=float(pos[0]), v=float(vel[0]))
    lam = hlip.lam
    ch, sh = np.cosh(lam * ts), np.sinh(lam * ts)
    p_flow = init.p * ch + init.v * sh / lam
    v_flow = init.p * lam * sh + init.v * ch
    return {
        "max_pos_dev": float(np.max(np.abs(pos - p_flow))),
        "max_vel_dev": float(np.max(np.abs(vel - v_flow))),
        "initial_state": {"p": init.p, "v": init.v},
        "grid": grid,
    }
