"""Robot link parameters for the decoupled planar models.

The sagittal (X) model is a five-link chain: stance shank, stance thigh,
swing thigh, swing shank, torso.  The foot is lumped into the shank.  The
frontal (Y) model is a three-link chain whose leg lengths derive from the
sagittal stance geometry at the start of a step, so they are optional here
and filled in by ``with_y_legs``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path

# Factory-default humanoid parameters (SI units).
DEFAULT_PARAMS = {
    "m1": 6.759,     # shank mass, foot lumped in (kg)
    "m2": 3.0426,    # thigh mass (kg)
    "m3": 15.04579,  # torso mass (kg)
    "lx1": 0.3538,   # shank length (m)
    "lx2": 0.367,    # thigh length (m)
    "lx3": 0.65,     # torso length (m)
}

PARAMS_ENV_VAR = "HLIPGAIT_PARAMS"


@dataclass(frozen=True)
class LinkParams:
    """Masses, link lengths and joint-to-CoM offsets of the planar models.

    CoM offsets default to link midpoints.  ``rx1..rx5`` follow the X-model
    link order (stance shank, stance thigh, swing thigh, swing shank, torso);
    ``ry1..ry3`` follow the Y-model order (stance leg, swing leg, torso).
    """

    m1: float
    m2: float
    m3: float
    lx1: float
    lx2: float
    lx3: float
    rx1: float
    rx2: float
    rx3: float
    rx4: float
    rx5: float
    ry3: float
    ly1: float | None = None
    ly2: float | None = None
    ry1: float | None = None
    ry2: float | None = None

    def __post_init__(self):
        for name in ("m1", "m2", "m3", "lx1", "lx2", "lx3",
                     "rx1", "rx2", "rx3", "rx4", "rx5", "ry3"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"LinkParams.{name} must be finite and > 0, got {v!r}")
        for name in ("ly1", "ly2", "ry1", "ry2"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ValueError(f"LinkParams.{name} must be finite and > 0, got {v!r}")

    @property
    def total_mass(self) -> float:
        return 2.0 * self.m1 + 2.0 * self.m2 + self.m3

    @classmethod
    def from_dict(cls, d: dict) -> "LinkParams":
        base = dict(DEFAULT_PARAMS)
        known = set(base) | {"rx1", "rx2", "rx3", "rx4", "rx5", "ry3",
                             "ly1", "ly2", "ry1", "ry2"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown robot parameter(s): {sorted(unknown)}")
        base.update(d)
        base.setdefault("rx1", base["lx1"] / 2.0)
        base.setdefault("rx2", base["lx2"] / 2.0)
        base.setdefault("rx3", base["lx2"] / 2.0)
        base.setdefault("rx4", base["lx1"] / 2.0)
        base.setdefault("rx5", base["lx3"] / 2.0)
        base.setdefault("ry3", base["lx3"] / 2.0)
        return cls(**base)

    @classmethod
    def default(cls) -> "LinkParams":
        return cls.from_dict({})

    @classmethod
    def from_file(cls, path: str | Path) -> "LinkParams":
        """Load parameters from a ``key = value`` text file or a JSON file."""
        path = Path(path)
        text = path.read_text()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            data = json.loads(text)
        else:
            data = {}
            for lineno, raw in enumerate(text.splitlines(), 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, _, val = line.partition("=")
                data[key.strip()] = float(val)
        return cls.from_dict(data)

    @classmethod
    def from_env_or_default(cls, explicit: str | Path | None = None) -> "LinkParams":
        """Resolve parameters: explicit path > $HLIPGAIT_PARAMS > defaults."""
        if explicit is not None:
            return cls.from_file(explicit)
        env = os.environ.get(PARAMS_ENV_VAR)
        if env:
            return cls.from_file(env)
        return cls.default()

    def with_y_legs(self, ly1: float, ly2: float) -> "LinkParams":
        """Return a copy with frontal leg lengths set; leg CoM offsets default
        to the leg midpoints."""
        return replace(self, ly1=ly1, ly2=ly2, ry1=ly1 / 2.0, ry2=ly2 / 2.0)

    def require_y(self) -> "LinkParams":
        if self.ly1 is None or self.ly2 is None or self.ry1 is None or self.ry2 is None:
            raise ValueError(
                "Y-model leg lengths are not set; derive them from the sagittal "
                "stance pose via y_leg_lengths() and LinkParams.with_y_legs()")
        return self

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("m1", "m2", "m3", "lx1", "lx2", "lx3",
                                             "rx1", "rx2", "rx3", "rx4", "rx5", "ry3")}
        for k in ("ly1", "ly2", "ry1", "ry2"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out
