"""Closed-form gait synthesis for the decoupled planar models.

Each plan is one swing period of Bezier joint trajectories whose boundary
control points are solved in closed form so that, by construction:

* start and end poses are ground contacts related by the stance/swing swap,
* the end joint rates realize the pendulum step-length condition
  (CoM rate row) with zero vertical CoM rate and zero vertical swing-foot
  rate (soft landing, required for the height constraint to be consistent
  with the boundary rates),
* the CoM height stays at a constant target, enforced on the interior
  control points by a damped least-squares polish.

The requested pendulum height z0 always sets the step coefficients; the
kinematic height target is lowered to the reachable band when z0 exceeds
what the leg geometry admits (the plan records both).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import verify as _verify
from .bezier import BezierCurve, _uniform_basis
from .hlip import HlipParams, step_coeffs
from .kinematics import (
    _SWAP_IDX,
    clearance_grad_x,
    clearance_grad_y,
    clearance_x,
    clearance_y,
    com_jacobian_x,
    com_jacobian_y,
    com_x,
    com_x_batch,
    com_y,
    y_leg_lengths,
)
from .params import LinkParams


class GaitError(Exception):
    """Base class for planning failures."""


class ReachError(GaitError):
    """Requested step length exceeds the kinematic reach."""


class HeightError(GaitError):
    """Requested CoM height is outside the reachable band."""


class PlanningError(GaitError):
    """Search budget exhausted without a plan passing verification."""

    def __init__(self, message: str, best_report=None):
        super().__init__(message)
        self.best_report = best_report


# Bezier control values reported with the original design example; used only
# as search seeds, never trusted as solutions.
SEED_CONTROL_X = np.array([
    [0.1, 0.084, 0.0, 0.1, 0.1],
    [-0.175, -0.175, -0.043, 0.088, 0.088],
    [0.088, 0.088, -0.82, -0.174, -0.174],
    [0.1, 0.1, 2.4, 0.0835, 0.1],
])
SEED_CONTROL_Y = np.array([
    [3.14, 3.14, 3.14, 3.31, 3.30],
    [3.14, 3.14, 2.512, 2.97, 2.97],
])

from functools import lru_cache


@lru_cache(maxsize=16)
def _seed_rows_x(degree: int) -> np.ndarray:
    rows = BezierCurve(1.0, SEED_CONTROL_X).elevated(degree).control
    rows.setflags(write=False)
    return rows


@lru_cache(maxsize=16)
def _seed_interior_y(degree: int) -> np.ndarray:
    rows = BezierCurve(1.0, SEED_CONTROL_Y).elevated(degree).control[:, 2:degree - 1]
    rows = np.ascontiguousarray(rows)
    rows.setflags(write=False)
    return rows


# relative joint-rate penalty when projecting seed end-rates onto the
# boundary-condition manifold: prefer stance-side motion, keep torso calm
END_RATE_WEIGHTS = np.array([1.0, 1.0, 4.0, 4.0, 25.0])


@dataclass(frozen=True)
class SearchConfig:
    """Sampled-search settings around the seed free parameters."""

    samples: int = 256
    radius: float = 0.1
    rng_seed: int = 0
    polish_grid: int = 201
    verify_grid: int = 1000
    height_caps: tuple[float, ...] = (0.95, 0.85, 0.70)
    clearance_floor: float = 1e-3
    max_polish_iters: int = 40


@dataclass(frozen=True)
class GaitRequestX:
    """Sagittal gait request; give two of (step_length, walking_speed, t_ssp)."""

    step_length: float | None = None
    walking_speed: float | None = None
    t_ssp: float | None = None
    z0: float = 0.856
    degree: int = 4
    g: float = 9.81
    height_policy: str = "clamp"  # "clamp" lowers an unreachable height target
    height_tol: float = 1e-3
    seeds: "XSeeds | None" = None
    search: SearchConfig = field(default_factory=SearchConfig)

    def resolve_timing(self) -> tuple[float, float]:
        """Return (step_length, t_ssp), deriving the missing quantity."""
        given = [self.step_length is not None, self.walking_speed is not None,
                 self.t_ssp is not None]
        if sum(given) < 2:
            raise ValueError("specify at least two of step_length, walking_speed, t_ssp")
        if self.step_length is not None and self.walking_speed is not None:
            if self.walking_speed == 0.0:
                if self.step_length != 0.0:
                    raise ValueError("walking_speed 0 with nonzero step_length")
                if self.t_ssp is None:
                    raise ValueError("t_ssp required when both speed and length are 0")
                return 0.0, self.t_ssp
            t = self.step_length / self.walking_speed
            if self.t_ssp is not None and abs(t - self.t_ssp) > 1e-9:
                raise ValueError(
                    f"inconsistent request: step_length/walking_speed = {t}, "
                    f"t_ssp = {self.t_ssp}")
            if t <= 0:
                raise ValueError("step_length and walking_speed must have equal signs")
            return self.step_length, t
        if self.step_length is not None:
            return self.step_length, self.t_ssp
        return self.walking_speed * self.t_ssp, self.t_ssp


@dataclass(frozen=True)
class GaitRequestY:
    """Frontal gait request: lateral speed over a known swing period.

    The default polynomial degree is 6: the frontal model needs the extra
    interior freedom to hold the CoM height constant to the millimeter
    while keeping the swing leg clear (degree 4 provably cannot).
    """

    walking_speed: float
    t_ssp: float
    z0: float = 0.856
    degree: int = 6
    g: float = 9.81
    height_policy: str = "clamp"
    height_tol: float = 1e-3
    seeds: "YSeeds | None" = None
    search: SearchConfig = field(default_factory=SearchConfig)


@dataclass
class XSeeds:
    """Initial values for the free parameters of the sagittal solve."""

    stance_lean: float                       # alpha^1_0
    end_rates: np.ndarray                    # seed alpha^{1..4}_{N-1}
    interior: np.ndarray                     # (4, N-3) alpha^{1..4}_{2..N-2}

    @classmethod
    def for_degree(cls, degree: int) -> "XSeeds":
        if degree < 4:
            raise ValueError("sagittal gait needs degree >= 4")
        rows = _seed_rows_x(degree)
        return cls(stance_lean=float(rows[0, 0]),
                   end_rates=rows[:, degree - 1].copy(),
                   interior=rows[:, 2:degree - 1].copy())

    @classmethod
    def for_step(cls, degree: int, l_step: float) -> "XSeeds":
        """Default seeds with the stance lean scaled up for long steps
        (a longer step needs a larger contact split to stay reachable)."""
        seeds = cls.for_degree(degree)
        seeds.stance_lean = 0.1 + max(0.0, 0.65 * (abs(l_step) - 0.25))
        return seeds

    def mirrored(self) -> "XSeeds":
        return XSeeds(-self.stance_lean, -self.end_rates, -self.interior)

    def perturbed(self, rng: np.random.Generator, radius: float) -> "XSeeds":
        return XSeeds(
            self.stance_lean + rng.uniform(-radius, radius),
            self.end_rates + rng.uniform(-radius, radius, self.end_rates.shape),
            self.interior + rng.uniform(-radius, radius, self.interior.shape))


@dataclass
class YSeeds:
    """Initial values for the free parameters of the frontal solve."""

    interior: np.ndarray                     # (2, M-3) beta^{1,2}_{2..M-2}

    @classmethod
    def for_degree(cls, degree: int) -> "YSeeds":
        if degree < 4:
            raise ValueError("frontal gait needs degree >= 4")
        return cls(interior=_seed_interior_y(degree).copy())

    def mirrored(self) -> "YSeeds":
        # channels are role-indexed (1 = stance, 2 = swing), so a lateral
        # mirror only reflects the angles about the vertical
        return YSeeds(interior=(2.0 * np.pi - self.interior).copy())

    def perturbed(self, rng: np.random.Generator, radius: float) -> "YSeeds":
        return YSeeds(self.interior + rng.uniform(-radius, radius, self.interior.shape))


@dataclass(frozen=True)
class PlanX:
    curve: BezierCurve
    request: GaitRequestX
    lp: LinkParams
    step_length: float
    t_ssp: float
    z_pendulum: float       # height defining the step coefficients
    z_target: float         # constant CoM height the trajectory holds
    hlip: HlipParams
    verify_report: "_verify.VerifyReport"
    solve_time: float
    samples_tried: int


@dataclass(frozen=True)
class PlanY:
    curve: BezierCurve
    request: GaitRequestY
    lp: LinkParams
    step_length: float
    t_ssp: float
    z_pendulum: float
    z_target: float
    hlip: HlipParams
    verify_report: "_verify.VerifyReport"
    solve_time: float
    samples_tried: int


# ---------------------------------------------------------------------------
# small dense Levenberg-Marquardt (hot path; scipy call overhead is too big
# for the per-plan latency budget)
# ---------------------------------------------------------------------------

def _levenberg_marquardt(resid_fn, jac_fn, p0, max_iter=24, lam0=1e-3,
                         cost_tol=1e-14, step_tol=1e-12, score_fn=None,
                         score_target=0.0):
    """Minimize sum of squares; returns the iterate with the best score
    (``score_fn`` defaults to the cost) and stops early once the score
    reaches ``score_target``."""
    p = np.asarray(p0, dtype=float)
    r = resid_fn(p)
    cost = float(r @ r)
    lam = lam0
    best_p, best_score = p.copy(), (score_fn(p) if score_fn else cost)
    if best_score <= score_target:
        return best_p, best_score
    stall = 0
    for _ in range(max_iter):
        j = jac_fn(p)
        g = j.T @ r
        h = j.T @ j
        d = np.diag(h).copy()
        d[d < 1e-12] = 1e-12
        accepted = False
        for _ in range(6):
            try:
                step = np.linalg.solve(h + lam * np.diag(d), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            p_try = p + step
            r_try = resid_fn(p_try)
            cost_try = float(r_try @ r_try)
            if cost_try < cost:
                p, r, cost = p_try, r_try, cost_try
                lam = max(lam * 0.33, 1e-12)
                accepted = True
                break
            lam *= 4.0
        if not accepted:
            break
        score = score_fn(p) if score_fn else cost
        if score < 0.98 * best_score:
            stall = 0
        else:
            stall += 1
        if score < best_score:
            best_p, best_score = p.copy(), score
            if best_score <= score_target:
                break
        if stall >= 5:
            break
        if cost < cost_tol or float(np.max(np.abs(step))) < step_tol:
            break
    return best_p, best_score


@lru_cache(maxsize=32)
def _clearance_floor_profile(n: int, mid: float) -> np.ndarray:
    u = np.linspace(0.0, 1.0, n)
    # quartic near the endpoints so a parabolic liftoff never trips it
    prof = 16.0 * mid * (u * (1.0 - u)) ** 2
    prof.setflags(write=False)
    return prof


# the clearance leaves/returns to zero with zero rate at both ends of a step,
# so its end curvatures must stay positive for the foot not to dip under
KAPPA_MIN = 0.5
KAPPA_WEIGHT = 0.05


# ---------------------------------------------------------------------------
# sagittal (X) planner
# ---------------------------------------------------------------------------

def _contact_mean_angle(stance_lean: float, lp: LinkParams) -> float:
    """Solve l1 sin(a + s) + l2 sin(s) = 0 for the thigh-angle mean s."""
    a = stance_lean
    if a == 0.0:
        return 0.0
    f = lambda s: lp.lx1 * math.sin(a + s) + lp.lx2 * math.sin(s)
    lo, hi = (-math.pi / 2, -1e-16) if a > 0 else (1e-16, math.pi / 2)
    return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)


def _legs_z_num(q4: np.ndarray, lp: LinkParams) -> np.ndarray:
    """CoM-height numerator of channels 1-4 (torso angle set to zero,
    its cosine term excluded)."""
    q5 = np.zeros_like(np.asarray(q4[0], dtype=float))
    qq = np.vstack([q4, q5[None, :]]) if np.ndim(q4[0]) else np.append(q4, 0.0)
    _, z = com_x_batch(np.atleast_2d(qq.reshape(5, -1)), lp)
    return lp.total_mass * z - lp.m3 * lp.rx5


@dataclass
class XBoundary:
    alpha0: np.ndarray
    alpha1: np.ndarray
    alpha_nm1: np.ndarray
    alpha_n: np.ndarray
    nullspace: np.ndarray       # (2, 5) end-rate directions preserving the solve
    t1: float
    t2: float
    z_target: float


def solve_boundary_x(l_step: float, t_ssp: float, z_pendulum: float,
                     z_target: float, lp: LinkParams, degree: int,
                     seeds: XSeeds, g: float = 9.81) -> XBoundary:
    """Closed-form boundary control points of the sagittal step.

    Chain: contact equation -> step-length inversion -> swap conditions ->
    torso angle from the height target -> end joint rates from the pendulum
    condition (CoM rate rows) plus soft landing, as the minimal weighted
    correction of the seeded rates -> start rates from the rate-swap.
    """
    n = degree
    a = seeds.stance_lean
    if l_step != 0.0 and abs(math.sin(a)) < 1e-3:
        raise ReachError("stance lean too small to realize a nonzero step")
    s = _contact_mean_angle(a, lp)
    if l_step == 0.0:
        d_half = 0.0
    else:
        if abs(math.sin(s)) < 1e-3 and abs(a) > 0:
            # s ~ -0.49 a for this geometry, so this only triggers for tiny a
            raise ReachError("contact geometry is degenerate for this lean")
        arg = -l_step * math.sin(s) / (2.0 * lp.lx1 * math.sin(a))
        if abs(arg) > 1.0:
            raise ReachError(
                f"step length {l_step:.3f} m exceeds the reach of the leg "
                f"geometry (|{arg:.3f}| > 1 in the step-length inversion)")
        d_half = math.asin(arg)
    a2n, a3n = s + d_half, s - d_half
    legs_m = float(_legs_z_num(np.array([a, a2n, a3n, a]), lp))
    e_tor = lp.m3 * lp.rx5
    carg = (lp.total_mass * z_target - legs_m) / e_tor
    if not -0.999 <= carg <= 1.0 - 1e-12:
        raise HeightError(
            f"CoM height {z_target:.3f} m unreachable at the contact pose "
            f"(cos torso = {carg:.3f})")
    # torso lean follows the walking direction so mirrored requests yield
    # mirrored gaits (both arccos branches are equally near upright)
    q5 = math.copysign(math.acos(carg), l_step if l_step != 0.0 else 1.0)
    alpha_n = np.array([a, a2n, a3n, a, q5])
    alpha0 = np.array([a, a3n, a2n, a, q5])
    lam = math.sqrt(g / z_pendulum)
    lt = lam * t_ssp
    t1 = -2.0 * math.sinh(lt / 2.0) ** 2
    t2 = math.sinh(lt) / lam
    x_n = float(com_x(alpha_n, lp)[0])
    cmat = np.vstack([com_jacobian_x(alpha_n, lp),
                      clearance_grad_x(alpha_n, lp)])
    rhs = np.array([t_ssp / (n * t2) * (l_step - t1 * x_n), 0.0, 0.0])
    d_seed = np.zeros(5)
    d_seed[:4] = alpha_n[:4] - seeds.end_rates
    w_inv = np.diag(1.0 / END_RATE_WEIGHTS)
    gram = cmat @ w_inv @ cmat.T
    try:
        delta = d_seed + w_inv @ cmat.T @ np.linalg.solve(gram, rhs - cmat @ d_seed)
    except np.linalg.LinAlgError:
        delta = d_seed + np.linalg.pinv(cmat) @ (rhs - cmat @ d_seed)
    nullspace = np.linalg.svd(cmat)[2][3:]
    alpha_nm1 = alpha_n - delta
    alpha1 = alpha0 + delta[_SWAP_IDX]
    return XBoundary(alpha0, alpha1, alpha_nm1, alpha_n, nullspace,
                     t1, t2, z_target)


def _x_height_target(l_step: float, lp: LinkParams, seeds: XSeeds, z0: float,
                     cap: float, policy: str) -> float:
    """Height target from the torso-authority cap: keep the torso cosine at
    the contact pose at or below ``cap`` so the height solve stays well
    conditioned."""
    a = seeds.stance_lean
    s = _contact_mean_angle(a, lp)
    if l_step == 0.0:
        d_half = 0.0
    else:
        arg = -l_step * math.sin(s) / (2.0 * lp.lx1 * math.sin(a))
        if abs(arg) > 1.0:
            raise ReachError(f"step length {l_step:.3f} m out of reach")
        d_half = math.asin(arg)
    legs_m = float(_legs_z_num(np.array([a, s + d_half, s - d_half, a]), lp))
    e_tor = lp.m3 * lp.rx5
    ceiling = (cap * e_tor + legs_m) / lp.total_mass
    if z0 <= ceiling:
        return z0
    if policy == "exact":
        raise HeightError(
            f"requested CoM height {z0:.3f} m exceeds the reachable target "
            f"{ceiling:.4f} m and height_policy is 'exact'")
    return ceiling


def _assemble_ctrl_x(bnd: XBoundary, seeds: XSeeds, degree: int) -> np.ndarray:
    ctrl = np.zeros((5, degree + 1))
    ctrl[:, 0] = bnd.alpha0
    ctrl[:, 1] = bnd.alpha1
    ctrl[:, degree - 1] = bnd.alpha_nm1
    ctrl[:, degree] = bnd.alpha_n
    ctrl[:4, 2:degree - 1] = seeds.interior
    ctrl[4, 2:degree - 1] = bnd.alpha_n[4]
    return ctrl


def _init_torso_channel(ctrl: np.ndarray, degree: int, t_ssp: float,
                        z_target: float, lp: LinkParams, n_grid: int) -> None:
    """Pointwise height solve for the torso angle followed by a pinned
    least-squares refit of its interior control points (in place)."""
    basis = _uniform_basis(n_grid, degree)
    legs = _legs_z_num(ctrl[:4] @ basis.T, lp)
    e_tor = lp.m3 * lp.rx5
    carg = np.clip((lp.total_mass * z_target - legs) / e_tor, -1.0, 1.0)
    branch = 1.0 if ctrl[4, 0] >= 0.0 else -1.0
    q5s = branch * np.arccos(carg)
    pin = [0, 1, degree - 1, degree]
    free = list(range(2, degree - 1))
    target = q5s - basis[:, pin] @ ctrl[4, pin]
    bf = basis[:, free]
    ctrl[4, free] = np.linalg.solve(bf.T @ bf, bf.T @ target)


def _x_trig_fields(q: np.ndarray, lp: LinkParams):
    """Fused CoM-height / clearance values and gradients for a (5, n) batch
    (one pass over the trigonometry; this is the polish hot loop)."""
    from .kinematics import _x_coeffs

    a, b, c, d, e = _x_coeffs(lp)
    mt = lp.total_mass
    l1, l2 = lp.lx1, lp.lx2
    s12, c12 = np.sin(q[0] + q[1]), np.cos(q[0] + q[1])
    s2, c2 = np.sin(q[1]), np.cos(q[1])
    s3, c3 = np.sin(q[2]), np.cos(q[2])
    s34, c34 = np.sin(q[2] + q[3]), np.cos(q[2] + q[3])
    s5, c5 = np.sin(q[4]), np.cos(q[4])
    z = (a * c12 + b * c2 + c * c3 + d * c34 + e * c5) / mt
    gam = l1 * (c12 - c34) + l2 * (c2 - c3)
    gz = np.vstack([-a * s12, -a * s12 - b * s2, -c * s3 - d * s34,
                    -d * s34, -e * s5]) / mt
    zero = np.zeros_like(s12)
    gg = np.vstack([-l1 * s12, -l1 * s12 - l2 * s2, l1 * s34 + l2 * s3,
                    l1 * s34, zero])
    return z, gam, gz, gg


def _polish_x(ctrl0: np.ndarray, bnd: XBoundary, lp: LinkParams, t_ssp: float,
              seeds: XSeeds, cfg: SearchConfig, height_tol: float):
    """Damped least-squares pass over the interior control points plus the
    end-rate nullspace, flattening the CoM height while a hinge keeps the
    swing foot clear of the ground."""
    from .kinematics import clearance_hess_x

    degree = ctrl0.shape[1] - 1
    n = cfg.polish_grid
    basis = _uniform_basis(n, degree)
    floor = _clearance_floor_profile(n, cfg.clearance_floor)
    w_hinge = 100.0
    mu_leg = 0.005
    free = [(c, j) for j in range(2, degree - 1) for c in range(5)]
    nulls = bnd.nullspace
    n_free = len(free)
    n_par = n_free + len(nulls)
    p_seed = np.array([ctrl0[c, j] for c, j in free] + [0.0] * len(nulls))
    mu = np.array([mu_leg if c != 4 else 0.0 for c, _ in free] + [0.0] * len(nulls))
    base1 = ctrl0[:, 1].copy()
    base_nm1 = ctrl0[:, degree - 1].copy()
    sc = degree * (degree - 1) / t_ssp ** 2
    rate = degree / t_ssp
    # the step boundary poses are pinned: their gradients are constants
    g0 = clearance_grad_x(ctrl0[:, 0], lp)
    gt = clearance_grad_x(ctrl0[:, degree], lp)
    h0 = clearance_hess_x(ctrl0[:, 0], lp)
    ht = clearance_hess_x(ctrl0[:, degree], lp)
    null_d1 = [nv[_SWAP_IDX] for nv in nulls]

    def build(p):
        ctrl = ctrl0.copy()
        for k, (c, j) in enumerate(free):
            ctrl[c, j] = p[k]
        ctrl[:, 1] = base1
        ctrl[:, degree - 1] = base_nm1
        for k, nv in enumerate(nulls):
            ctrl[:, 1] += p[n_free + k] * null_d1[k]
            ctrl[:, degree - 1] -= p[n_free + k] * nv
        return ctrl

    memo = {}

    def fields(p):
        key = p.tobytes()
        hit = memo.get(key)
        if hit is not None:
            return hit
        ctrl = build(p)
        q = ctrl @ basis.T
        z, gam, gz, gg = _x_trig_fields(q, lp)
        d0 = rate * (ctrl[:, 1] - ctrl[:, 0])
        dt = rate * (ctrl[:, degree] - ctrl[:, degree - 1])
        k0 = d0 @ h0 @ d0 + g0 @ (sc * (ctrl[:, 0] - 2.0 * ctrl[:, 1] + ctrl[:, 2]))
        kt = dt @ ht @ dt + gt @ (sc * (ctrl[:, degree] - 2.0 * ctrl[:, degree - 1]
                                        + ctrl[:, degree - 2]))
        out = (ctrl, z - bnd.z_target, gam, gz, gg, d0, dt, k0, kt)
        memo.clear()
        memo[key] = out
        return out

    def resid(p):
        _, zres, gam, _, _, _, _, k0, kt = fields(p)
        hinge = np.maximum(floor - gam, 0.0) * w_hinge
        krows = KAPPA_WEIGHT * np.array([max(0.0, KAPPA_MIN - k0),
                                         max(0.0, KAPPA_MIN - kt)])
        return np.concatenate([zres, hinge, krows, mu * (p - p_seed)])

    def jac(p):
        _, zres, gam, gz, gg, d0, dt, k0, kt = fields(p)
        jz = np.empty((n, n_par))
        jg = np.empty((n, n_par))
        for k, (c, j) in enumerate(free):
            jz[:, k] = gz[c] * basis[:, j]
            jg[:, k] = gg[c] * basis[:, j]
        for k, nv in enumerate(nulls):
            dq = np.outer(null_d1[k], basis[:, 1]) - np.outer(nv, basis[:, degree - 1])
            jz[:, n_free + k] = np.einsum("ct,ct->t", gz, dq)
            jg[:, n_free + k] = np.einsum("ct,ct->t", gg, dq)
        act = (floor - gam) > 0.0
        jh = np.where(act[:, None], -jg * w_hinge, 0.0)
        row0 = np.zeros(n_par)
        rowt = np.zeros(n_par)
        for k, (c, j) in enumerate(free):
            if j == 2:
                row0[k] = sc * g0[c]
            if j == degree - 2:
                rowt[k] = sc * gt[c]
        for k, nv in enumerate(nulls):
            da1 = null_d1[k]
            row0[n_free + k] = 2.0 * rate * (d0 @ h0 @ da1) - 2.0 * sc * (g0 @ da1)
            rowt[n_free + k] = 2.0 * rate * (dt @ ht @ nv) + 2.0 * sc * (gt @ nv)
        jk = np.zeros((2, n_par))
        if k0 < KAPPA_MIN:
            jk[0] = -KAPPA_WEIGHT * row0
        if kt < KAPPA_MIN:
            jk[1] = -KAPPA_WEIGHT * rowt
        return np.vstack([jz, jh, jk, np.diag(mu)])

    def score(p):
        _, zres, gam, *_ = fields(p)
        worst_z = float(np.max(np.abs(zres)))
        scuff = float(max(0.0, -float(np.min(gam[1:-1]))))
        return worst_z + 1e3 * scuff

    target = 0.9 * height_tol
    p_best, best = _levenberg_marquardt(resid, jac, p_seed,
                                        max_iter=cfg.max_polish_iters,
                                        score_fn=score, score_target=target)
    if target < best <= 3.0 * height_tol:
        # shallow stall just above the gate: restart with a fresh trust region
        p2, s2 = _levenberg_marquardt(resid, jac, p_best, lam0=1.0,
                                      max_iter=16, score_fn=score,
                                      score_target=target)
        if s2 < best:
            p_best, best = p2, s2
    ctrl, zres, gam, *_ = fields(p_best)
    return ctrl, float(np.max(np.abs(zres))), gam


def _z_grad_x(q: np.ndarray, lp: LinkParams) -> np.ndarray:
    """d z_com / d q for a (5, n) batch; shape (5, n)."""
    from .kinematics import _x_coeffs

    a, b, c, d, e = _x_coeffs(lp)
    mt = lp.total_mass
    s12 = np.sin(q[0] + q[1])
    s2, s3 = np.sin(q[1]), np.sin(q[2])
    s34 = np.sin(q[2] + q[3])
    s5 = np.sin(q[4])
    return np.vstack([-a * s12, -a * s12 - b * s2, -c * s3 - d * s34,
                      -d * s34, -e * s5]) / mt


def _gate_x(ctrl: np.ndarray, z_err: float, gam: np.ndarray,
            height_tol: float) -> bool:
    interior = gam[1:-1]
    n = len(gam)
    lo, hi = int(0.05 * n), int(0.95 * n)
    core = gam[lo:hi]
    return (z_err <= 0.95 * height_tol
            and float(np.min(interior)) > -1e-12
            and float(np.min(core)) >= 2e-6)


def plan_x(request: GaitRequestX, lp: LinkParams | None = None) -> PlanX:
    """Sagittal gait synthesis: sampled search around the seeds, closed-form
    boundary solve and interior polish per sample, first verified plan wins.

    Backward requests are planned as the forward mirror and reflected back
    (the model is exactly symmetric under negating all angles), which keeps
    behavior identical for both directions."""
    t_start = time.perf_counter()
    lp = lp or LinkParams.default()
    l_step, t_ssp = request.resolve_timing()
    if l_step < 0.0:
        fwd = replace(
            request,
            step_length=None if request.step_length is None else -request.step_length,
            walking_speed=None if request.walking_speed is None else -request.walking_speed,
            seeds=request.seeds.mirrored() if request.seeds is not None else None)
        mirror = plan_x(fwd, lp)
        curve = BezierCurve(mirror.curve.duration, -mirror.curve.control)
        report = _verify.verify_x_curve(
            curve, lp, mirror.hlip, l_step, mirror.z_target,
            grid=request.search.verify_grid, height_tol=request.height_tol)
        return PlanX(curve=curve, request=request, lp=lp, step_length=l_step,
                     t_ssp=t_ssp, z_pendulum=mirror.z_pendulum,
                     z_target=mirror.z_target, hlip=mirror.hlip,
                     verify_report=report,
                     solve_time=time.perf_counter() - t_start,
                     samples_tried=mirror.samples_tried)
    cfg = request.search
    seeds0 = request.seeds or XSeeds.for_step(request.degree, l_step)
    rng = None
    hlip = HlipParams(z0=request.z0, t_ssp=t_ssp, g=request.g)
    best_report = None
    best_violation = math.inf
    last_error: GaitError | None = None
    tried = 0
    # long steps need the larger torso authority of a lower height target
    # first; short steps succeed at the higher, more upright targets
    caps = cfg.height_caps if abs(l_step) <= 0.3 else \
        tuple(sorted(cfg.height_caps)[1:]) + (max(cfg.height_caps),)
    for k in range(cfg.samples):
        if k == 1:
            rng = np.random.default_rng(cfg.rng_seed)
        seeds = seeds0 if k == 0 else seeds0.perturbed(rng, cfg.radius)
        z_prev = None
        for cap in caps:
            tried += 1
            try:
                z_t = _x_height_target(l_step, lp, seeds, request.z0, cap,
                                       request.height_policy)
                if z_prev is not None and abs(z_t - z_prev) < 1e-12:
                    continue  # cap not binding: identical subproblem
                z_prev = z_t
                bnd = solve_boundary_x(l_step, t_ssp, request.z0, z_t, lp,
                                       request.degree, seeds, g=request.g)
            except GaitError as err:
                last_error = err
                if isinstance(err, ReachError) and k == 0:
                    raise
                break  # lower caps cannot fix a reach failure of this sample
            ctrl = _assemble_ctrl_x(bnd, seeds, request.degree)
            _init_torso_channel(ctrl, request.degree, t_ssp, z_t, lp,
                                cfg.polish_grid)
            ctrl, z_err, gam = _polish_x(ctrl, bnd, lp, t_ssp, seeds, cfg,
                                         request.height_tol)
            if not _gate_x(ctrl, z_err, gam, request.height_tol):
                continue
            curve = BezierCurve(t_ssp, ctrl)
            report = _verify.verify_x_curve(
                curve, lp, hlip, l_step, z_t, grid=cfg.verify_grid,
                height_tol=request.height_tol)
            if report.passed:
                return PlanX(curve=curve, request=request, lp=lp,
                             step_length=l_step, t_ssp=t_ssp,
                             z_pendulum=request.z0, z_target=z_t, hlip=hlip,
                             verify_report=report,
                             solve_time=time.perf_counter() - t_start,
                             samples_tried=k + 1)
            worst = report.worst_violation_ratio()
            if worst < best_violation:
                best_violation, best_report = worst, report
        if k == 0 and isinstance(last_error, ReachError):
            raise last_error
    if best_report is None and last_error is not None:
        raise last_error
    raise PlanningError(
        f"no sagittal plan within {cfg.samples} samples "
        f"(best violation ratio {best_violation:.3g})", best_report)


# ---------------------------------------------------------------------------
# frontal (Y) planner
# ---------------------------------------------------------------------------

@dataclass
class YBoundary:
    beta0: np.ndarray
    beta1: np.ndarray
    beta_mm1: np.ndarray
    beta_m: np.ndarray
    t1: float
    t2: float
    z_target: float


def _legs_z_num_y(q2: np.ndarray, lp: LinkParams):
    """CoM-height numerator of the two leg channels (torso roll excluded)."""
    a = (lp.m1 + lp.m2) * (lp.ry1 + lp.ly1) + lp.m3 * lp.ly1
    b = (lp.m1 + lp.m2) * lp.ry2
    return a * np.cos(q2[1] - np.pi) + b * np.cos(np.pi - q2[0])


def solve_boundary_y(l_step: float, t_ssp: float, z_pendulum: float,
                     z_target: float, lp: LinkParams, degree: int,
                     g: float = 9.81) -> YBoundary:
    """Closed-form boundary control points of the frontal step.

    The legs start together and vertical with zero rates; the end pose splits
    them symmetrically about the vertical to the step length, and the end
    rates solve the pendulum condition (with the half-cycle 1/(2 T2) factor)
    together with equal leg rates.
    """
    lp.require_y()
    m = degree
    if abs(lp.ly1 - lp.ly2) > 1e-9:
        raise GaitError(
            "frontal planning requires equal leg lengths (the sagittal "
            f"boundary guarantees this); got ly1={lp.ly1}, ly2={lp.ly2}")
    arg = l_step / (2.0 * lp.ly1)
    if abs(arg) > 1.0:
        raise ReachError(
            f"lateral step {l_step:.3f} m exceeds the leg spread "
            f"(|{arg:.3f}| > 1)")
    b1m = math.pi + math.asin(arg)
    b2m = 2.0 * math.pi - b1m
    legs_m = float(_legs_z_num_y(np.array([b1m, b2m]), lp))
    e_tor = lp.m3 * lp.ry3
    carg = (lp.total_mass * z_target - legs_m) / e_tor
    if not -0.999 <= carg <= 1.0 - 1e-12:
        raise HeightError(
            f"CoM height {z_target:.3f} m unreachable at the frontal contact "
            f"pose (cos roll = {carg:.3f})")
    # forward branch; backward gaits are planned mirrored and reflected
    sgn = 1.0 if l_step >= 0.0 else -1.0
    b3m = sgn * math.acos(carg)
    beta_m = np.array([b1m, b2m, b3m])
    legs_0 = float(_legs_z_num_y(np.array([math.pi, math.pi]), lp))
    carg0 = (lp.total_mass * z_target - legs_0) / e_tor
    if not -0.999 <= carg0 <= 1.0 - 1e-12:
        raise HeightError(
            f"CoM height {z_target:.3f} m unreachable at the feet-together "
            f"pose (cos roll = {carg0:.3f})")
    b30 = sgn * math.acos(carg0)
    beta0 = np.array([math.pi, math.pi, b30])
    lam = math.sqrt(g / z_pendulum)
    lt = lam * t_ssp
    t1 = -2.0 * math.sinh(lt / 2.0) ** 2
    t2 = math.sinh(lt) / lam
    a_c = (lp.m1 + lp.m2) * (lp.ry1 + lp.ly1) + lp.m3 * lp.ly1
    b_c = (lp.m1 + lp.m2) * lp.ry2
    mt = lp.total_mass
    y_m = (a_c * math.sin(b2m - math.pi) + b_c * math.sin(math.pi - b1m)
           + e_tor * math.sin(b3m)) / mt
    amat = np.array([
        [-b_c * math.cos(math.pi - b1m) / mt, a_c * math.cos(b2m - math.pi) / mt,
         e_tor * math.cos(b3m) / mt],
        [b_c * math.sin(math.pi - b1m) / mt, -a_c * math.sin(b2m - math.pi) / mt,
         -e_tor * math.sin(b3m) / mt],
        [1.0, -1.0, 0.0],
    ])
    rhs = np.array([t_ssp / (2.0 * m * t2) * (l_step - t1 * y_m), 0.0, 0.0])
    try:
        delta = np.linalg.solve(amat, rhs)
    except np.linalg.LinAlgError as err:
        raise HeightError(f"singular frontal end-rate system: {err}") from err
    beta_mm1 = beta_m - delta
    return YBoundary(beta0=beta0, beta1=beta0.copy(), beta_mm1=beta_mm1,
                     beta_m=beta_m, t1=t1, t2=t2, z_target=z_target)


def _y_height_target(l_step: float, lp: LinkParams, z0: float, cap: float,
                     policy: str) -> float:
    lp.require_y()
    arg = l_step / (2.0 * lp.ly1)
    if abs(arg) > 1.0:
        raise ReachError(f"lateral step {l_step:.3f} m out of reach")
    b1m = math.pi + math.asin(arg)
    legs_m = float(_legs_z_num_y(np.array([b1m, 2.0 * math.pi - b1m]), lp))
    legs_0 = float(_legs_z_num_y(np.array([math.pi, math.pi]), lp))
    e_tor = lp.m3 * lp.ry3
    ceiling = (cap * e_tor + min(legs_m, legs_0)) / lp.total_mass
    if z0 <= ceiling:
        return z0
    if policy == "exact":
        raise HeightError(
            f"requested CoM height {z0:.3f} m exceeds the reachable frontal "
            f"target {ceiling:.4f} m and height_policy is 'exact'")
    return ceiling


def _z_grad_y(q: np.ndarray, lp: LinkParams) -> np.ndarray:
    a = (lp.m1 + lp.m2) * (lp.ry1 + lp.ly1) + lp.m3 * lp.ly1
    b = (lp.m1 + lp.m2) * lp.ry2
    e = lp.m3 * lp.ry3
    mt = lp.total_mass
    return np.vstack([b * np.sin(np.pi - q[0]), -a * np.sin(q[1] - np.pi),
                      -e * np.sin(q[2])]) / mt


def _y_trig_fields(q: np.ndarray, lp: LinkParams):
    """Fused height/clearance values and gradients for a (3, n) batch."""
    a = (lp.m1 + lp.m2) * (lp.ry1 + lp.ly1) + lp.m3 * lp.ly1
    b = (lp.m1 + lp.m2) * lp.ry2
    e = lp.m3 * lp.ry3
    mt = lp.total_mass
    s1p, c1p = np.sin(np.pi - q[0]), np.cos(np.pi - q[0])
    s2p, c2p = np.sin(q[1] - np.pi), np.cos(q[1] - np.pi)
    s3, c3 = np.sin(q[2]), np.cos(q[2])
    z = (a * c2p + b * c1p + e * c3) / mt
    gam = lp.ly1 * c1p - lp.ly2 * c2p
    n = q.shape[1]
    gz = np.empty((3, n))
    np.multiply(s1p, b / mt, out=gz[0])
    np.multiply(s2p, -a / mt, out=gz[1])
    np.multiply(s3, -e / mt, out=gz[2])
    gg = np.empty((3, n))
    np.multiply(s1p, lp.ly1, out=gg[0])
    np.multiply(s2p, lp.ly2, out=gg[1])
    gg[2] = 0.0
    return z, gam, gz, gg


def _polish_y(ctrl0: np.ndarray, z_target: float, t_ssp: float,
              lp: LinkParams, cfg: SearchConfig, height_tol: float):
    from .kinematics import clearance_hess_y

    degree = ctrl0.shape[1] - 1
    # the frontal fields are smooth and low-order; a coarse grid suffices
    # (the final verification still runs on the full grid)
    n = min(cfg.polish_grid, 61)
    basis = _uniform_basis(n, degree)
    floor = _clearance_floor_profile(n, cfg.clearance_floor)
    w_hinge = 100.0
    mu_leg = 0.005
    free = [(c, j) for j in range(2, degree - 1) for c in range(3)]
    n_par = len(free)
    p_seed = np.array([ctrl0[c, j] for c, j in free])
    mu = np.array([mu_leg if c != 2 else 0.0 for c, _ in free])
    sc_t = degree * (degree - 1) / t_ssp ** 2
    rate = degree / t_ssp
    g0 = clearance_grad_y(ctrl0[:, 0], lp)
    gt = clearance_grad_y(ctrl0[:, degree], lp)
    ht = clearance_hess_y(ctrl0[:, degree], lp)
    # boundary columns are pinned, including the start rates (zero)
    dt = rate * (ctrl0[:, degree] - ctrl0[:, degree - 1])
    kt_rate_part = dt @ ht @ dt

    def build(p):
        ctrl = ctrl0.copy()
        for k, (c, j) in enumerate(free):
            ctrl[c, j] = p[k]
        return ctrl

    memo = {}

    def fields(p):
        key = p.tobytes()
        hit = memo.get(key)
        if hit is not None:
            return hit
        ctrl = build(p)
        q = ctrl @ basis.T
        z, gam, gz, gg = _y_trig_fields(q, lp)
        k0 = g0 @ (sc_t * (ctrl[:, 0] - 2.0 * ctrl[:, 1] + ctrl[:, 2]))
        kt = kt_rate_part + gt @ (sc_t * (ctrl[:, degree]
                                          - 2.0 * ctrl[:, degree - 1]
                                          + ctrl[:, degree - 2]))
        out = (ctrl, z - z_target, gam, gz, gg, k0, kt)
        memo.clear()
        memo[key] = out
        return out

    def resid(p):
        _, zres, gam, _, _, k0, kt = fields(p)
        hinge = np.maximum(floor - gam, 0.0) * w_hinge
        krows = KAPPA_WEIGHT * np.array([max(0.0, KAPPA_MIN - k0),
                                         max(0.0, KAPPA_MIN - kt)])
        return np.concatenate([zres, hinge, krows, mu * (p - p_seed)])

    def jac(p):
        _, zres, gam, gz, gg, k0, kt = fields(p)
        jz = np.empty((n, n_par))
        jg = np.empty((n, n_par))
        for k, (c, j) in enumerate(free):
            jz[:, k] = gz[c] * basis[:, j]
            jg[:, k] = gg[c] * basis[:, j]
        act = (floor - gam) > 0.0
        jh = np.where(act[:, None], -jg * w_hinge, 0.0)
        row0 = np.zeros(n_par)
        rowt = np.zeros(n_par)
        for k, (c, j) in enumerate(free):
            if j == 2:
                row0[k] = sc_t * g0[c]
            if j == degree - 2:
                rowt[k] = sc_t * gt[c]
        jk = np.zeros((2, n_par))
        if k0 < KAPPA_MIN:
            jk[0] = -KAPPA_WEIGHT * row0
        if kt < KAPPA_MIN:
            jk[1] = -KAPPA_WEIGHT * rowt
        return np.vstack([jz, jh, jk, np.diag(mu)])

    def score(p):
        _, zres, gam, *_ = fields(p)
        worst_z = float(np.max(np.abs(zres)))
        scuff = float(max(0.0, -float(np.min(gam[1:-1]))))
        return worst_z + 1e3 * scuff

    p_best, _ = _levenberg_marquardt(resid, jac, p_seed,
                                     max_iter=cfg.max_polish_iters,
                                     score_fn=score,
                                     score_target=0.9 * height_tol)
    ctrl, zres, gam, *_ = fields(p_best)
    return ctrl, float(np.max(np.abs(zres))), gam


def plan_y(request: GaitRequestY, lp: LinkParams) -> PlanY:
    """Frontal gait synthesis; requires Y leg lengths on ``lp``."""
    t_start = time.perf_counter()
    lp.require_y()
    l_step = request.walking_speed * request.t_ssp
    t_ssp = request.t_ssp
    if l_step < 0.0:
        fwd = replace(
            request, walking_speed=-request.walking_speed,
            seeds=request.seeds.mirrored() if request.seeds is not None else None)
        mirror = plan_y(fwd, lp)
        ctrl = mirror.curve.control.copy()
        ctrl[:2] = 2.0 * np.pi - ctrl[:2]
        ctrl[2] = -ctrl[2]
        curve = BezierCurve(mirror.curve.duration, ctrl)
        report = _verify.verify_y_curve(
            curve, lp, mirror.hlip, l_step, mirror.z_target,
            grid=request.search.verify_grid, height_tol=request.height_tol)
        return PlanY(curve=curve, request=request, lp=lp, step_length=l_step,
                     t_ssp=t_ssp, z_pendulum=mirror.z_pendulum,
                     z_target=mirror.z_target, hlip=mirror.hlip,
                     verify_report=report,
                     solve_time=time.perf_counter() - t_start,
                     samples_tried=mirror.samples_tried)
    cfg = request.search
    seeds0 = request.seeds or YSeeds.for_degree(request.degree)
    rng = None
    hlip = HlipParams(z0=request.z0, t_ssp=t_ssp, g=request.g)
    degree = request.degree
    best_report = None
    best_violation = math.inf
    last_error: GaitError | None = None
    for k in range(cfg.samples):
        if k == 1:
            rng = np.random.default_rng(cfg.rng_seed)
        seeds = seeds0 if k == 0 else seeds0.perturbed(rng, cfg.radius)
        z_prev = None
        for cap in cfg.height_caps:
            try:
                z_t = _y_height_target(l_step, lp, request.z0, cap,
                                       request.height_policy)
                if z_prev is not None and abs(z_t - z_prev) < 1e-12:
                    continue  # cap not binding: identical subproblem
                z_prev = z_t
                bnd = solve_boundary_y(l_step, t_ssp, request.z0, z_t, lp,
                                       degree, g=request.g)
            except GaitError as err:
                last_error = err
                if isinstance(err, ReachError) and k == 0:
                    raise
                break
            ctrl = np.zeros((3, degree + 1))
            ctrl[:, 0] = bnd.beta0
            ctrl[:, 1] = bnd.beta1
            ctrl[:, degree - 1] = bnd.beta_mm1
            ctrl[:, degree] = bnd.beta_m
            ctrl[:2, 2:degree - 1] = seeds.interior
            basis = _uniform_basis(min(cfg.polish_grid, 61), degree)
            legs = _legs_z_num_y(ctrl[:2] @ basis.T, lp)
            e_tor = lp.m3 * lp.ry3
            carg = np.clip((lp.total_mass * z_t - legs) / e_tor, -1.0, 1.0)
            q3s = (1.0 if l_step >= 0.0 else -1.0) * np.arccos(carg)
            pin = [0, 1, degree - 1, degree]
            fr = list(range(2, degree - 1))
            target = q3s - basis[:, pin] @ ctrl[2, pin]
            bf = basis[:, fr]
            ctrl[2, fr] = np.linalg.solve(bf.T @ bf, bf.T @ target)
            ctrl, z_err, gam = _polish_y(ctrl, z_t, t_ssp, lp, cfg,
                                         request.height_tol)
            if not _gate_x(ctrl, z_err, gam, request.height_tol):
                continue
            curve = BezierCurve(t_ssp, ctrl)
            report = _verify.verify_y_curve(
                curve, lp, hlip, l_step, z_t, grid=cfg.verify_grid,
                height_tol=request.height_tol)
            if report.passed:
                return PlanY(curve=curve, request=request, lp=lp,
                             step_length=l_step, t_ssp=t_ssp,
                             z_pendulum=request.z0, z_target=z_t, hlip=hlip,
                             verify_report=report,
                             solve_time=time.perf_counter() - t_start,
                             samples_tried=k + 1)
            worst = report.worst_violation_ratio()
            if worst < best_violation:
                best_violation, best_report = worst, report
    if best_report is None and last_error is not None:
        raise last_error
    raise PlanningError(
        f"no frontal plan within {cfg.samples} samples "
        f"(best violation ratio {best_violation:.3g})", best_report)


# ---------------------------------------------------------------------------
# standalone height enforcement (strict variant of the in-planner machinery)
# ---------------------------------------------------------------------------

def enforce_com_height(curve: BezierCurve, channel: int, z0: float,
                       lp: LinkParams, model: str, grid: int = 201,
                       height_tol: float = 1e-3,
                       check_grid: int = 1000) -> BezierCurve:
    """Re-solve one channel so the model CoM height equals z0 pointwise.

    Solves the torso angle on a dense grid by arccos (erroring if z0 is
    unreachable anywhere), refits that channel with its four boundary control
    points pinned, and errors if the refit leaves more than ``height_tol`` of
    deviation on the check grid.
    """
    if model not in ("x", "y"):
        raise ValueError("model must be 'x' or 'y'")
    degree = curve.degree
    basis = _uniform_basis(grid, degree)
    ctrl = np.array(curve.control)
    q = ctrl @ basis.T
    mt = lp.total_mass
    if model == "x":
        e_tor = lp.m3 * lp.rx5
        legs = _legs_z_num(q[:4], lp)
    else:
        lp.require_y()
        e_tor = lp.m3 * lp.ry3
        legs = _legs_z_num_y(q[:2], lp)
    carg = (mt * z0 - legs) / e_tor
    bad = np.abs(carg) > 1.0
    if np.any(bad):
        worst = float(np.max(np.abs(carg)))
        raise HeightError(
            f"CoM height {z0} m unreachable on {int(np.sum(bad))} grid "
            f"points (worst cos = {worst:.4f})")
    solved = np.arccos(carg)
    pin = {0: ctrl[channel, 0], 1: ctrl[channel, 1],
           degree - 1: ctrl[channel, degree - 1], degree: ctrl[channel, degree]}
    ts = np.linspace(0.0, curve.duration, grid)
    from .bezier import fit_constrained

    fit = fit_constrained(zip(ts, solved), degree, curve.duration, pinned=pin)
    ctrl[channel] = fit.curve.control[0]
    out = BezierCurve(curve.duration, ctrl)
    qc = out.eval_uniform(check_grid)
    z = com_x_batch(qc, lp)[1] if model == "x" else com_y(qc, lp)[1]
    dev = float(np.max(np.abs(z - z0)))
    if dev > height_tol:
        raise HeightError(
            f"height enforcement residual {dev:.2e} m exceeds {height_tol} m "
            f"(channel {channel} cannot track the required profile)")
    return out
