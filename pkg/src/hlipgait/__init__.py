"""Real-time periodic gait synthesis for a point-mass-pendulum biped
approximation, with joint retargeting and locomotion reward terms."""

from .bezier import BezierCurve, FitResult, fit_constrained
from .hlip import (
    HlipParams,
    HlipState,
    StepCoeffs,
    relabel_support,
    ssp_flow,
    step_coeffs,
    step_length_from_final,
    support_transition,
)
from .kinematics import (
    SWAP_X,
    XConfig,
    YConfig,
    clearance_x,
    clearance_y,
    com_jacobian_x,
    com_jacobian_y,
    com_x,
    com_y,
    step_length_x,
    step_length_y,
    swing_foot_offset_x,
    y_leg_lengths,
)
from .params import LinkParams
from .planner import (
    GaitError,
    GaitRequestX,
    GaitRequestY,
    HeightError,
    PlanningError,
    PlanX,
    PlanY,
    ReachError,
    SearchConfig,
    XSeeds,
    YSeeds,
    enforce_com_height,
    plan_x,
    plan_y,
    solve_boundary_x,
    solve_boundary_y,
)
from .retarget import (
    JOINT_NAMES,
    RobotGait,
    assemble_gait,
    map_config,
    map_rates,
    sample,
)
from .rewards import (
    FootState,
    PhaseConfig,
    TrackPair,
    composite,
    contact_s,
    phase_c,
    reward_cs,
    reward_track,
    reward_vf,
)
from .verify import VerifyReport, hlip_consistency, verify_x, verify_y

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
