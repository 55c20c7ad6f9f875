"""Gait file: self-contained JSON serialization of a planned gait.

The file stores full-precision control matrices, the robot parameters, the
verification reports and the request provenance, so reloading reproduces
byte-identical sampled trajectories.  Wall-clock data (solve times,
timestamps) is deliberately excluded to keep outputs reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bezier import BezierCurve
from .hlip import HlipParams
from .params import LinkParams
from .retarget import RobotGait
from .verify import VerifyReport

SCHEMA = "hlipgait/1"


@dataclass(frozen=True)
class GaitFile:
    """In-memory image of a gait file."""

    lp: LinkParams
    t_ssp: float
    z0: float
    g: float
    stance_first: str
    curve_x: BezierCurve
    curve_y: BezierCurve
    step_length_x: float
    step_length_y: float
    z_target_x: float
    z_target_y: float
    verify: dict
    provenance: dict

    @property
    def gait(self) -> RobotGait:
        return RobotGait(curve_x=self.curve_x, curve_y=self.curve_y,
                         t_ssp=self.t_ssp, stance_first=self.stance_first,
                         z0=self.z0)

    def hlip(self) -> HlipParams:
        return HlipParams(z0=self.z0, t_ssp=self.t_ssp, g=self.g)


def _curve_block(curve: BezierCurve, step_length: float, z_target: float) -> dict:
    return {
        "degree": curve.degree,
        "duration": curve.duration,
        "control": curve.control.tolist(),
        "step_length": step_length,
        "z_target": z_target,
    }


def save_gait(path: str | Path, plan_x, plan_y, stance_first: str = "right",
              provenance: dict | None = None,
              samples: dict | None = None) -> dict:
    """Write a gait file from a pair of plans; returns the document."""
    doc = {
        "schema": SCHEMA,
        "robot": plan_x.lp.to_dict(),
        "t_ssp": plan_x.t_ssp,
        "z0": plan_x.z_pendulum,
        "g": plan_x.request.g,
        "stance_first": stance_first,
        "x": _curve_block(plan_x.curve, plan_x.step_length, plan_x.z_target),
        "y": _curve_block(plan_y.curve, plan_y.step_length, plan_y.z_target),
        "verify": {"x": plan_x.verify_report.to_dict(),
                   "y": plan_y.verify_report.to_dict()},
        "provenance": provenance or {},
    }
    if samples is not None:
        doc["samples"] = samples
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return doc


def load_gait(path: str | Path) -> GaitFile:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported gait file schema: {doc.get('schema')!r}")
    lp = LinkParams.from_dict(doc["robot"])
    bx, by = doc["x"], doc["y"]
    return GaitFile(
        lp=lp,
        t_ssp=float(doc["t_ssp"]),
        z0=float(doc["z0"]),
        g=float(doc.get("g", 9.81)),
        stance_first=doc.get("stance_first", "right"),
        curve_x=BezierCurve(float(bx["duration"]), np.array(bx["control"])),
        curve_y=BezierCurve(float(by["duration"]), np.array(by["control"])),
        step_length_x=float(bx["step_length"]),
        step_length_y=float(by["step_length"]),
        z_target_x=float(bx["z_target"]),
        z_target_y=float(by["z_target"]),
        verify=doc.get("verify", {}),
        provenance=doc.get("provenance", {}),
    )
