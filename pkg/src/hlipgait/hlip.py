"""Hybrid linear inverted pendulum: closed-form single-support flow and
step transition maps.

The pendulum is a point mass at constant height z0 on a massless telescoping
leg.  During single support the horizontal offset p from the support point
obeys  p'' = lam^2 p  with lam = sqrt(g / z0).  Double support is treated as
instantaneous: velocity is continuous, and relabeling the support point
shifts p by the step length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GRAVITY = 9.81  # default m/s^2; the source never states its value


@dataclass(frozen=True)
class HlipParams:
    """Pendulum constants. ``lam`` is always recomputed from z0 and g."""

    z0: float
    t_ssp: float
    g: float = GRAVITY

    def __post_init__(self):
        for name in ("z0", "t_ssp", "g"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"HlipParams.{name} must be finite and > 0, got {v!r}")

    @property
    def lam(self) -> float:
        return math.sqrt(self.g / self.z0)


@dataclass(frozen=True)
class HlipState:
    """CoM offset from the support point (m) and CoM velocity (m/s)."""

    p: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.v)):
            raise ValueError(f"HlipState components must be finite, got {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.v])


@dataclass(frozen=True)
class StepCoeffs:
    """Coefficients tying the step length to the single-support final state:
    L = t1 * p_final + t2 * v_final."""

    t1: float
    t2: float


def a_ssp(params: HlipParams) -> np.ndarray:
    """State matrix of the single-support dynamics xdot = A x, x = [p, v]."""
    return np.array([[0.0, 1.0], [params.lam ** 2, 0.0]])


def _flow_unchecked(state: HlipState, params: HlipParams, t: float) -> HlipState:
    # hyperbolic form of exp(A t); stable for small lam*t, valid for t < 0 too
    lt = params.lam * t
    ch, sh = math.cosh(lt), math.sinh(lt)
    return HlipState(p=state.p * ch + state.v * sh / params.lam,
                     v=state.p * params.lam * sh + state.v * ch)


def ssp_flow(state: HlipState, params: HlipParams, t: float) -> HlipState:
    """Propagate the single-support state forward by t in [0, t_ssp]."""
    if not math.isfinite(t):
        raise ValueError(f"flow time must be finite, got {t!r}")
    if t < 0.0 or t > params.t_ssp:
        raise ValueError(f"flow time {t} outside [0, {params.t_ssp}]")
    return _flow_unchecked(state, params, t)


def support_transition(state: HlipState) -> HlipState:
    """Impact map in support-point coordinates: position and velocity are
    both continuous (the double-support phase is instantaneous)."""
    return state


def relabel_support(state: HlipState, step_length: float) -> HlipState:
    """Re-express the pre-impact state relative to the new support point,
    which sits ``step_length`` ahead: p -> p - L, v unchanged."""
    return HlipState(p=state.p - step_length, v=state.v)


def step_coeffs(params: HlipParams) -> StepCoeffs:
    """(t1, t2) with t1 = 1 - cosh(lam T) and t2 = sinh(lam T) / lam."""
    lt = params.lam * params.t_ssp
    # 1 - cosh(x) written as -2 sinh^2(x/2) to avoid cancellation near 0
    t1 = -2.0 * math.sinh(lt / 2.0) ** 2
    t2 = math.sinh(lt) / params.lam
    return StepCoeffs(t1=t1, t2=t2)


def step_length_from_final(final: HlipState, params: HlipParams) -> float:
    """Step length L = p(T) - p(0) given the single-support final state."""
    c = step_coeffs(params)
    return c.t1 * final.p + c.t2 * final.v
