"""Planar kinematics of the decoupled humanoid models.

X-model: five absolute joint angles (stance shank+thigh measured together as
q1+q2 for the shank, q2 for the thigh, q3/q4 for the swing thigh/shank, q5
for the torso), rooted at the stance foot.  Y-model: three angles (stance
leg q1, swing leg q2, both measured so pi is vertical, torso roll q3),
rooted likewise.

All functions accept a single configuration, shape (dof,), or a batch,
shape (dof, n); mass-weighted CoM positions, their Jacobians and the
swing-foot clearance are closed-form trigonometric expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import LinkParams

# Stance/swing relabeling of the X-model: q1<->q4 (shanks), q2<->q3 (thighs),
# torso unchanged.
SWAP_X = np.array([
    [0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1],
], dtype=float)

_SWAP_IDX = np.array([3, 2, 1, 0, 4])


@dataclass
class XConfig:
    """Sagittal configuration; angles in radians, optional rates."""

    q: np.ndarray
    dq: np.ndarray | None = None

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        if self.q.shape != (5,):
            raise ValueError(f"XConfig.q must have shape (5,), got {self.q.shape}")
        if not np.all(np.isfinite(self.q)):
            raise ValueError("XConfig.q must be finite")
        if np.any(np.abs(self.q) >= np.pi):
            raise ValueError("XConfig angles must satisfy |q| < pi")
        if self.dq is not None:
            self.dq = np.asarray(self.dq, dtype=float)
            if self.dq.shape != (5,) or not np.all(np.isfinite(self.dq)):
                raise ValueError("XConfig.dq must be a finite 5-vector")


@dataclass
class YConfig:
    """Frontal configuration; leg angles near pi, torso roll near 0."""

    q: np.ndarray
    dq: np.ndarray | None = None

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        if self.q.shape != (3,):
            raise ValueError(f"YConfig.q must have shape (3,), got {self.q.shape}")
        if not np.all(np.isfinite(self.q)):
            raise ValueError("YConfig.q must be finite")
        if self.dq is not None:
            self.dq = np.asarray(self.dq, dtype=float)
            if self.dq.shape != (3,) or not np.all(np.isfinite(self.dq)):
                raise ValueError("YConfig.dq must be a finite 3-vector")


def _as_q(cfg, dof: int) -> np.ndarray:
    q = cfg.q if hasattr(cfg, "q") else np.asarray(cfg, dtype=float)
    q = np.asarray(q, dtype=float)
    if q.shape[0] != dof:
        raise ValueError(f"expected {dof} joint angles, got shape {q.shape}")
    return q


# ---------------------------------------------------------------------------
# X-model
# ---------------------------------------------------------------------------

def com_x(cfg, lp: LinkParams):
    """Mass-weighted CoM (x, z) of the X-model, measured from the stance foot."""
    q = _as_q(cfg, 5)
    q1, q2, q3, q4, q5 = q
    s12, c12 = np.sin(q1 + q2), np.cos(q1 + q2)
    s2, c2 = np.sin(q2), np.cos(q2)
    s3, c3 = np.sin(q3), np.cos(q3)
    s34, c34 = np.sin(q3 + q4), np.cos(q3 + q4)
    s5, c5 = np.sin(q5), np.cos(q5)
    m1, m2, m3 = lp.m1, lp.m2, lp.m3
    l1, l2 = lp.lx1, lp.lx2
    h1 = lp.rx1 * s12
    h2 = l1 * s12 + lp.rx2 * s2
    h3 = l1 * s12 + l2 * s2 - lp.rx3 * s3
    h4 = l1 * s12 + l2 * s2 - l2 * s3 - lp.rx4 * s34
    h5 = l1 * s12 + l2 * s2 + lp.rx5 * s5
    v1 = lp.rx1 * c12
    v2 = l1 * c12 + lp.rx2 * c2
    v3 = l1 * c12 + l2 * c2 - lp.rx3 * c3
    v4 = l1 * c12 + l2 * c2 - l2 * c3 - lp.rx4 * c34
    v5 = l1 * c12 + l2 * c2 + lp.rx5 * c5
    mt = lp.total_mass
    x = (m1 * h1 + m2 * h2 + m2 * h3 + m1 * h4 + m3 * h5) / mt
    z = (m1 * v1 + m2 * v2 + m2 * v3 + m1 * v4 + m3 * v5) / mt
    return x, z


def _x_coeffs(lp: LinkParams):
    """Per-angle trig coefficients of the X CoM numerator (grouped terms)."""
    m1, m2, m3 = lp.m1, lp.m2, lp.m3
    a = m1 * lp.rx1 + (2.0 * m2 + m1 + m3) * lp.lx1   # coeff of sin/cos(q1+q2)
    b = m2 * lp.rx2 + (m2 + m1 + m3) * lp.lx2          # coeff of sin/cos(q2)
    c = -(m2 * lp.rx3 + m1 * lp.lx2)                   # coeff of sin/cos(q3)
    d = -m1 * lp.rx4                                   # coeff of sin/cos(q3+q4)
    e = m3 * lp.rx5                                    # coeff of sin/cos(q5)
    return a, b, c, d, e


def com_jacobian_x(cfg, lp: LinkParams) -> np.ndarray:
    """K_x with [xdot_com; zdot_com] = K_x(q) qdot.

    Returns shape (2, 5) for a single configuration, (2, 5, n) for a batch.
    """
    q = _as_q(cfg, 5)
    a, b, c, d, e = _x_coeffs(lp)
    mt = lp.total_mass
    s12, c12 = np.sin(q[0] + q[1]), np.cos(q[0] + q[1])
    s2, c2 = np.sin(q[1]), np.cos(q[1])
    s3, c3 = np.sin(q[2]), np.cos(q[2])
    s34, c34 = np.sin(q[2] + q[3]), np.cos(q[2] + q[3])
    s5, c5 = np.sin(q[4]), np.cos(q[4])
    row_x = np.stack([a * c12, a * c12 + b * c2, c * c3 + d * c34, d * c34, e * c5]) / mt
    row_z = np.stack([-a * s12, -a * s12 - b * s2, -c * s3 - d * s34, -d * s34, -e * s5]) / mt
    return np.stack([row_x, row_z])


def com_x_batch(q: np.ndarray, lp: LinkParams):
    """(x_com, z_com) arrays for a (5, n) batch of configurations."""
    a, b, c, d, e = _x_coeffs(lp)
    mt = lp.total_mass
    x = (a * np.sin(q[0] + q[1]) + b * np.sin(q[1]) + c * np.sin(q[2])
         + d * np.sin(q[2] + q[3]) + e * np.sin(q[4])) / mt
    z = (a * np.cos(q[0] + q[1]) + b * np.cos(q[1]) + c * np.cos(q[2])
         + d * np.cos(q[2] + q[3]) + e * np.cos(q[4])) / mt
    return x, z


def clearance_x(cfg, lp: LinkParams):
    """Swing-foot height above ground; zero exactly at the impact event."""
    q = _as_q(cfg, 5)
    return (lp.lx1 * (np.cos(q[0] + q[1]) - np.cos(q[2] + q[3]))
            + lp.lx2 * (np.cos(q[1]) - np.cos(q[2])))


def clearance_grad_x(cfg, lp: LinkParams) -> np.ndarray:
    """Gradient of the clearance w.r.t. the five angles (torso term is 0)."""
    q = _as_q(cfg, 5)
    s12 = np.sin(q[0] + q[1])
    s2, s3 = np.sin(q[1]), np.sin(q[2])
    s34 = np.sin(q[2] + q[3])
    zero = np.zeros_like(s12)
    return np.stack([-lp.lx1 * s12,
                     -lp.lx1 * s12 - lp.lx2 * s2,
                     lp.lx1 * s34 + lp.lx2 * s3,
                     lp.lx1 * s34,
                     zero])


def clearance_hess_x(q: np.ndarray, lp: LinkParams) -> np.ndarray:
    """5x5 Hessian of the clearance at a single configuration."""
    c12 = math.cos(q[0] + q[1])
    c2, c3 = math.cos(q[1]), math.cos(q[2])
    c34 = math.cos(q[2] + q[3])
    h = np.zeros((5, 5))
    h[0, 0] = h[0, 1] = h[1, 0] = -lp.lx1 * c12
    h[1, 1] = -lp.lx1 * c12 - lp.lx2 * c2
    h[2, 2] = lp.lx1 * c34 + lp.lx2 * c3
    h[2, 3] = h[3, 2] = lp.lx1 * c34
    h[3, 3] = lp.lx1 * c34
    return h


def swing_foot_offset_x(cfg, lp: LinkParams):
    """Horizontal offset of the swing foot from the stance foot."""
    q = _as_q(cfg, 5)
    return (lp.lx1 * (np.sin(q[0] + q[1]) - np.sin(q[2] + q[3]))
            + lp.lx2 * (np.sin(q[1]) - np.sin(q[2])))


def step_length_x(cfg0, cfg_t, lp: LinkParams, contact_tol: float = 1e-6) -> float:
    """Sagittal step length from the start and end configurations of a step.

    Both poses are expected to be ground contacts; a violated contact still
    yields a value but is flagged via warnings. Under the stance/swing swap
    symmetry the start offset is minus the end offset, so the half-difference
    equals the end offset.
    """
    import warnings

    g0 = float(clearance_x(cfg0, lp))
    gt = float(clearance_x(cfg_t, lp))
    if abs(g0) > contact_tol or abs(gt) > contact_tol:
        warnings.warn(
            f"step_length_x: contact precondition violated "
            f"(clearance {g0:.3e}, {gt:.3e})", stacklevel=2)
    return 0.5 * (float(swing_foot_offset_x(cfg_t, lp))
                  - float(swing_foot_offset_x(cfg0, lp)))


def y_leg_lengths(x_initial, lp: LinkParams) -> tuple[float, float]:
    """Frontal leg lengths from the sagittal stance/swing shank angles at the
    start of a step (law of cosines across the knee)."""
    q = _as_q(x_initial, 5)
    l1, l2 = lp.lx1, lp.lx2

    def _len(knee: float) -> float:
        return math.sqrt(l1 * l1 + l2 * l2 - 2.0 * l1 * l2 * math.cos(math.pi - knee))

    return _len(float(q[0])), _len(float(q[3]))


# ---------------------------------------------------------------------------
# Y-model
# ---------------------------------------------------------------------------

def _y_coeffs(lp: LinkParams):
    lp.require_y()
    a = (lp.m1 + lp.m2) * (lp.ry1 + lp.ly1) + lp.m3 * lp.ly1  # coeff of (q2 - pi) terms
    b = (lp.m1 + lp.m2) * lp.ry2                              # coeff of (pi - q1) terms
    e = lp.m3 * lp.ry3                                        # torso roll coeff
    return a, b, e


def com_y(cfg, lp: LinkParams):
    """Mass-weighted CoM (y, z) of the Y-model, measured from the stance foot."""
    q = _as_q(cfg, 3)
    a, b, e = _y_coeffs(lp)
    mt = lp.total_mass
    y = (a * np.sin(q[1] - np.pi) + b * np.sin(np.pi - q[0]) + e * np.sin(q[2])) / mt
    z = (a * np.cos(q[1] - np.pi) + b * np.cos(np.pi - q[0]) + e * np.cos(q[2])) / mt
    return y, z


def com_jacobian_y(cfg, lp: LinkParams) -> np.ndarray:
    """K_y with [ydot_com; zdot_com] = K_y(q) qdot; shape (2, 3[, n])."""
    q = _as_q(cfg, 3)
    a, b, e = _y_coeffs(lp)
    mt = lp.total_mass
    row_y = np.stack([-b * np.cos(np.pi - q[0]), a * np.cos(q[1] - np.pi),
                      e * np.cos(q[2])]) / mt
    row_z = np.stack([b * np.sin(np.pi - q[0]), -a * np.sin(q[1] - np.pi),
                      -e * np.sin(q[2])]) / mt
    return np.stack([row_y, row_z])


def clearance_y(cfg, lp: LinkParams):
    """Swing-foot height above ground in the frontal plane."""
    lp.require_y()
    q = _as_q(cfg, 3)
    return lp.ly1 * np.cos(np.pi - q[0]) - lp.ly2 * np.cos(q[1] - np.pi)


def clearance_grad_y(cfg, lp: LinkParams) -> np.ndarray:
    lp.require_y()
    q = _as_q(cfg, 3)
    zero = np.zeros_like(np.asarray(q[2], dtype=float))
    return np.stack([lp.ly1 * np.sin(np.pi - q[0]),
                     lp.ly2 * np.sin(q[1] - np.pi),
                     zero])


def clearance_hess_y(q: np.ndarray, lp: LinkParams) -> np.ndarray:
    """3x3 Hessian of the frontal clearance at a single configuration."""
    h = np.zeros((3, 3))
    h[0, 0] = -lp.ly1 * math.cos(math.pi - q[0])
    h[1, 1] = lp.ly2 * math.cos(q[1] - math.pi)
    return h


def step_length_y(cfg_t, lp: LinkParams) -> float:
    """Frontal step length from the end-of-step configuration."""
    lp.require_y()
    q = _as_q(cfg_t, 3)
    return -2.0 * lp.ly1 * float(np.sin((q[1] - q[0]) / 2.0))
